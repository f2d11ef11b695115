#pragma once

// Reference computations used by the tests. They evaluate the defining sums
// directly with std::exp on real phases and share no code with the library
// beyond the model's grid description (points and weights).

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "toeplab/group_model.hpp"

namespace oracle {

using toeplab::cplx;
using toeplab::CMatrix;
using toeplab::CVector;
using toeplab::GroupModel;

inline constexpr double pi = std::numbers::pi;

inline double group_point(const GroupModel& m, int j)
{
    return m.is_circle() ? 2.0 * pi * j / m.samples() : (j - m.samples() / 2) * m.spacing();
}

/// Dual points of the spectral grid, bin k <-> frequency index k - floor(N/2).
inline double spectral_point(const GroupModel& m, int k)
{
    const int f = k - m.samples() / 2;
    return m.is_circle() ? f : f * 2.0 * pi / (m.samples() * m.spacing());
}

inline cplx expi(double x) { return {std::cos(x), std::sin(x)}; }

/// f^(xi) = sum_j w conj(gamma_xi(t_j)) f(t_j) on the given dual points.
inline CVector forward(const GroupModel& m, const CVector& f, const Eigen::VectorXd& xi)
{
    const double w = m.is_circle() ? 1.0 / m.samples() : m.spacing();
    CVector out = CVector::Zero(xi.size());
    for (Eigen::Index d = 0; d < xi.size(); ++d) {
        for (int j = 0; j < m.samples(); ++j) {
            out(d) += w * expi(-xi(d) * group_point(m, j)) * f(j);
        }
    }
    return out;
}

inline Eigen::VectorXd dual_points(const GroupModel& m)
{
    Eigen::VectorXd xi(m.dual_size());
    const int lo = m.is_circle() ? -m.modes() : -m.samples() / 2;
    const double step = m.is_circle() ? 1.0 : 2.0 * pi / (m.samples() * m.spacing());
    for (int d = 0; d < xi.size(); ++d) {
        xi(d) = (lo + d) * step;
    }
    return xi;
}

/// Dense orthonormal spectral matrix U(k, j) = exp(-i xi_k t_j) / sqrt(N).
inline CMatrix unitary(const GroupModel& m)
{
    const int n = m.samples();
    CMatrix u(n, n);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            u(k, j) = expi(-spectral_point(m, k) * group_point(m, j)) / std::sqrt(static_cast<double>(n));
        }
    }
    return u;
}

/// T_phi by compressing U diag(phi) U^* to the nonnegative bins 0..top.
inline CMatrix toeplitz(const GroupModel& m, const CVector& phi_samples)
{
    const CMatrix u = unitary(m);
    const CMatrix full = u * phi_samples.asDiagonal() * u.adjoint();
    const int z = m.samples() / 2;
    const int top = m.is_circle() ? m.modes() : m.samples() / 2 - 1;
    return full.block(z, z, top + 1, top + 1);
}

inline CVector random_vector(std::mt19937_64& rng, Eigen::Index n)
{
    std::normal_distribution<double> g;
    CVector v(n);
    for (auto& x : v) {
        const double re = g(rng);
        x = {re, g(rng)};
    }
    return v;
}

inline double spectral_norm(const CMatrix& a)
{
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
}

} // namespace oracle
