#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "toeplab/group_model.hpp"
#include "toeplab/symbol.hpp"

namespace toeplab {

/// Coordinates a finite-section matrix is written in.
///  - hardy_fourier: orthonormal characters of the Hardy bins (frequencies 0..top);
///  - l2_sample: normalized point samples on the group grid;
///  - l2_fourier: orthonormal characters of the full N-bin spectral grid.
enum class Basis { hardy_fourier, l2_sample, l2_fourier };

inline std::string basis_name(Basis b)
{
    switch (b) {
    case Basis::hardy_fourier: return "hardy-fourier";
    case Basis::l2_sample: return "l2-sample";
    case Basis::l2_fourier: return "l2-fourier";
    }
    return "?";
}

inline Basis parse_basis(std::string_view name)
{
    if (name == "hardy-fourier") return Basis::hardy_fourier;
    if (name == "l2-sample") return Basis::l2_sample;
    if (name == "l2-fourier") return Basis::l2_fourier;
    throw ParseError("unknown basis '" + std::string(name) + "'");
}

inline int basis_dimension(const GroupModel& model, Basis b)
{
    return b == Basis::hardy_fourier ? model.hardy_size() : model.samples();
}

/// A square matrix representing an operator on H^2 or L^2 of a model,
/// in one of the three coordinate systems above.
class FiniteSectionOperator {
public:
    FiniteSectionOperator(GroupModel model, Basis basis, CMatrix matrix)
        : model_(std::move(model)), basis_(basis), matrix_(std::move(matrix))
    {
        const int n = basis_dimension(model_, basis_);
        if (matrix_.rows() != n || matrix_.cols() != n) {
            throw ModelMismatch("matrix of size " + std::to_string(matrix_.rows()) + "x"
                                + std::to_string(matrix_.cols()) + " does not fit basis "
                                + basis_name(basis_) + " of " + model_.to_string());
        }
    }

    static FiniteSectionOperator identity(const GroupModel& model, Basis basis)
    {
        const int n = basis_dimension(model, basis);
        return {model, basis, CMatrix::Identity(n, n)};
    }

    const GroupModel& model() const noexcept { return model_; }
    Basis basis() const noexcept { return basis_; }
    const CMatrix& matrix() const noexcept { return matrix_; }
    Eigen::Index dimension() const noexcept { return matrix_.rows(); }

private:
    GroupModel model_;
    Basis basis_;
    CMatrix matrix_;
};

namespace detail {

/// Phase exp(2 pi i m o / N) relating the plain DFT to the centered one.
inline cplx origin_phase(const GroupModel& model, long long m)
{
    return std::conj(model.character(m, 0));
}

/// Columns of U * x for the orthonormal spectral matrix U, via FFT.
inline CMatrix fourier_columns(const GroupModel& model, const CMatrix& x)
{
    const int n = model.samples();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CMatrix out(n, x.cols());
    std::vector<cplx> column(n);
    std::vector<cplx> phases(n);
    for (int k = 0; k < n; ++k) {
        phases[k] = origin_phase(model, model.spectral_frequency(k)) * scale;
    }
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        for (int j = 0; j < n; ++j) {
            column[j] = x(j, c);
        }
        const auto spectrum = dft(column, false);
        for (int k = 0; k < n; ++k) {
            out(k, c) = phases[k] * spectrum[wrap_index(model.spectral_frequency(k), n)];
        }
    }
    return out;
}

/// Columns of U^* y.
inline CMatrix inverse_fourier_columns(const GroupModel& model, const CMatrix& y)
{
    const int n = model.samples();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CMatrix out(n, y.cols());
    std::vector<cplx> column(n);
    std::vector<cplx> phases(n);
    for (int k = 0; k < n; ++k) {
        phases[k] = std::conj(origin_phase(model, model.spectral_frequency(k))) * scale;
    }
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
        for (int k = 0; k < n; ++k) {
            column[wrap_index(model.spectral_frequency(k), n)] = phases[k] * y(k, c);
        }
        const auto samples = dft(column, true);
        for (int j = 0; j < n; ++j) {
            out(j, c) = samples[j];
        }
    }
    return out;
}

inline void require_same_model(const FiniteSectionOperator& a, const FiniteSectionOperator& b)
{
    if (!(a.model() == b.model())) {
        throw ModelMismatch("operators live on different models: " + a.model().to_string() + " vs "
                            + b.model().to_string());
    }
}

inline void require_group_symbol(const SymbolSpec& s)
{
    if (s.side() != SymbolSide::group) {
        throw SideError("'" + s.to_string() + "' is a dual-side symbol; a group-side symbol is required");
    }
}

inline void require_dual_symbol(const SymbolSpec& s)
{
    if (s.side() != SymbolSide::dual) {
        throw SideError("'" + s.to_string() + "' is a group-side symbol; a dual-side symbol is required");
    }
}

} // namespace detail

/// Rewrites an l2 operator in the other l2 basis; A_f = U A_s U^*.
inline FiniteSectionOperator to_basis(const FiniteSectionOperator& a, Basis target)
{
    if (a.basis() == target) {
        return a;
    }
    if (a.basis() == Basis::hardy_fourier || target == Basis::hardy_fourier) {
        throw BasisMismatch("hardy-fourier sections only convert via compress_to_hardy / embed_in_l2");
    }
    const auto& model = a.model();
    if (target == Basis::l2_fourier) {
        // U A U^* = (U (U A)^*)^*
        const CMatrix ua = detail::fourier_columns(model, a.matrix());
        const CMatrix result = detail::fourier_columns(model, ua.adjoint()).adjoint();
        return {model, target, result};
    }
    const CMatrix ua = detail::inverse_fourier_columns(model, a.matrix());
    const CMatrix result = detail::inverse_fourier_columns(model, ua.adjoint()).adjoint();
    return {model, target, result};
}

/// P A P restricted to H^2, for an operator on L^2.
inline FiniteSectionOperator compress_to_hardy(const FiniteSectionOperator& a)
{
    if (a.basis() == Basis::hardy_fourier) {
        return a;
    }
    const auto f = to_basis(a, Basis::l2_fourier);
    const auto& model = a.model();
    const int h = model.hardy_size();
    const int z = model.spectral_zero();
    return {model, Basis::hardy_fourier, f.matrix().block(z, z, h, h)};
}

/// Extends a Hardy section by zero to L^2 (acting as A P).
inline FiniteSectionOperator embed_in_l2(const FiniteSectionOperator& a)
{
    if (a.basis() != Basis::hardy_fourier) {
        return a;
    }
    const auto& model = a.model();
    const int n = model.samples();
    CMatrix m = CMatrix::Zero(n, n);
    m.block(model.spectral_zero(), model.spectral_zero(), model.hardy_size(), model.hardy_size()) = a.matrix();
    return {model, Basis::l2_fourier, std::move(m)};
}

inline FiniteSectionOperator adjoint(const FiniteSectionOperator& a)
{
    return {a.model(), a.basis(), a.matrix().adjoint()};
}

/// A B. l2 operands in different bases are converted to A's basis.
inline FiniteSectionOperator compose(const FiniteSectionOperator& a, const FiniteSectionOperator& b)
{
    detail::require_same_model(a, b);
    if ((a.basis() == Basis::hardy_fourier) != (b.basis() == Basis::hardy_fourier)) {
        throw BasisMismatch("cannot compose " + basis_name(a.basis()) + " with " + basis_name(b.basis()));
    }
    const auto rhs = to_basis(b, a.basis());
    return {a.model(), a.basis(), a.matrix() * rhs.matrix()};
}

/// alpha A + beta B.
inline FiniteSectionOperator add(const FiniteSectionOperator& a, const FiniteSectionOperator& b,
                                 cplx alpha = 1.0, cplx beta = 1.0)
{
    detail::require_same_model(a, b);
    if ((a.basis() == Basis::hardy_fourier) != (b.basis() == Basis::hardy_fourier)) {
        throw BasisMismatch("cannot add " + basis_name(a.basis()) + " and " + basis_name(b.basis()));
    }
    const auto rhs = to_basis(b, a.basis());
    return {a.model(), a.basis(), alpha * a.matrix() + beta * rhs.matrix()};
}

inline CVector apply(const FiniteSectionOperator& a, const CVector& v)
{
    if (v.size() != a.dimension()) {
        throw ModelMismatch("vector length " + std::to_string(v.size()) + " does not match operator dimension "
                            + std::to_string(a.dimension()));
    }
    return a.matrix() * v;
}

inline FiniteSectionOperator multiplication_from_samples(const GridFunction& phi)
{
    return {phi.model(), Basis::l2_sample, phi.values().asDiagonal()};
}

/// M_phi: diagonal in the sample basis.
inline FiniteSectionOperator multiplication_operator(const GroupModel& model, const SymbolSpec& phi)
{
    detail::require_group_symbol(phi);
    check_representable(phi, model);
    return multiplication_from_samples(evaluate_on_group(phi, model));
}

/// P = D_{chi_Gamma+}: 1 on the nonnegative spectral bins.
inline FiniteSectionOperator hardy_projection(const GroupModel& model)
{
    const int n = model.samples();
    CVector d(n);
    for (int k = 0; k < n; ++k) {
        d(k) = model.spectral_frequency(k) >= 0 ? 1.0 : 0.0;
    }
    return {model, Basis::l2_fourier, d.asDiagonal()};
}

/// Fourier coefficients c[m] = (1/N) sum_j phi_j conj(gamma_m(t_j)) for |m| <= reach.
inline CVector toeplitz_coefficients(const GridFunction& phi, int reach)
{
    const auto& model = phi.model();
    const int n = model.samples();
    std::vector<cplx> in(phi.values().data(), phi.values().data() + n);
    const auto spectrum = detail::dft(in, false);
    CVector c(2 * reach + 1);
    for (int m = -reach; m <= reach; ++m) {
        c(m + reach) = detail::origin_phase(model, m) * spectrum[detail::wrap_index(m, n)] / static_cast<double>(n);
    }
    return c;
}

/// T_phi = P M_phi compressed to the Hardy bins: T(j, k) = c[j - k].
inline FiniteSectionOperator toeplitz_from_samples(const GridFunction& phi)
{
    const auto& model = phi.model();
    const int h = model.hardy_size();
    const CVector c = toeplitz_coefficients(phi, h - 1);
    CMatrix t(h, h);
    for (int k = 0; k < h; ++k) {
        for (int j = 0; j < h; ++j) {
            t(j, k) = c(j - k + h - 1);
        }
    }
    return {model, Basis::hardy_fourier, std::move(t)};
}

inline FiniteSectionOperator toeplitz_operator(const GroupModel& model, const SymbolSpec& phi)
{
    detail::require_group_symbol(phi);
    check_representable(phi, model);
    return toeplitz_from_samples(evaluate_on_group(phi, model));
}

/// D_theta on H^2: diagonal over the Hardy bins.
inline FiniteSectionOperator fourier_multiplier(const GroupModel& model, const SymbolSpec& theta)
{
    detail::require_dual_symbol(theta);
    check_representable(theta, model);
    const int h = model.hardy_size();
    CVector d(h);
    for (int i = 0; i < h; ++i) {
        d(i) = theta(i * model.dual_spacing());
    }
    return {model, Basis::hardy_fourier, d.asDiagonal()};
}

/// D_theta~ on L^2 with theta~ = chi_Gamma+ theta, in the l2-fourier basis.
inline FiniteSectionOperator fourier_multiplier_l2(const GroupModel& model, const SymbolSpec& theta)
{
    detail::require_dual_symbol(theta);
    check_representable(theta, model);
    const int n = model.samples();
    CVector d(n);
    for (int k = 0; k < n; ++k) {
        d(k) = theta(model.spectral_frequency(k) * model.dual_spacing());
    }
    return {model, Basis::l2_fourier, d.asDiagonal()};
}

/// (T_k f)(t) = sum_s k(t s^-1) f(s) w in the sample basis (cyclic on the grid).
inline FiniteSectionOperator convolution_operator_l2(const GridFunction& kernel)
{
    const auto& model = kernel.model();
    const int n = model.samples();
    const int o = model.origin_index();
    const double w = model.group_weight();
    CMatrix m(n, n);
    for (int l = 0; l < n; ++l) {
        for (int j = 0; j < n; ++j) {
            m(j, l) = w * kernel.values()(detail::wrap_index(static_cast<long long>(j) - l + o, n));
        }
    }
    return {model, Basis::l2_sample, std::move(m)};
}

/// The convolution operator compressed to H^2; equals D_{k^}.
inline FiniteSectionOperator convolution_operator(const GridFunction& kernel)
{
    return compress_to_hardy(convolution_operator_l2(kernel));
}

/// D_{theta} on H^2 for a multiplier given by its dual-grid values.
inline FiniteSectionOperator multiplier_from_dual(const DualGridFunction& theta)
{
    const auto& model = theta.model();
    const int h = model.hardy_size();
    CVector d(h);
    for (int i = 0; i < h; ++i) {
        d(i) = theta.values()(model.dual_index_of_frequency(i));
    }
    return {model, Basis::hardy_fourier, d.asDiagonal()};
}

/// k-check on the group grid, for k supported on the positive cone.
struct AnalyticSymbol {
    GridFunction symbol;
    /// Highest frequency carrying part of k; multiplication shifts spectra up by at most this.
    int reach = 0;
};

inline AnalyticSymbol analytic_symbol_from_positive_spectrum(const DualGridFunction& k)
{
    const auto& model = k.model();
    const double scale = k.values().cwiseAbs().maxCoeff();
    int reach = 0;
    for (int d = 0; d < model.dual_size(); ++d) {
        const double magnitude = std::abs(k.values()(d));
        const int m = model.dual_frequency(d);
        if (m < 0 && magnitude > bump_truncation * scale) {
            throw PreconditionError("spectrum has mass on the negative frequency " + std::to_string(m));
        }
        if (m >= 0 && magnitude > 0.0) {
            reach = std::max(reach, m);
        }
    }
    return {inverse_fourier(k), reach};
}

/// Largest singular value of (I - P) M_k P restricted to the Hardy bins whose
/// spectrum, shifted by the symbol's reach, stays inside the periodic window.
inline double hardy_invariance_defect(const AnalyticSymbol& a)
{
    const auto& model = a.symbol.model();
    const auto m = to_basis(multiplication_from_samples(a.symbol), Basis::l2_fourier);
    const int z = model.spectral_zero();
    const int top = model.spectral_frequency(model.samples() - 1);
    const int columns = top - a.reach + 1;
    if (columns <= 0) {
        throw PreconditionError("symbol reach leaves no Hardy bins inside the window");
    }
    const CMatrix block = m.matrix().block(0, z, z, columns);
    if (block.size() == 0) {
        return 0.0;
    }
    Eigen::BDCSVD<CMatrix> svd(block);
    return svd.singularValues()(0);
}

} // namespace toeplab
