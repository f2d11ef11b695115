#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "toeplab/operators.hpp"

namespace toeplab {

enum class NormMethod { svd, power_iteration };

inline std::string method_name(NormMethod m)
{
    return m == NormMethod::svd ? "svd" : "power";
}

inline NormMethod parse_method(std::string_view name)
{
    if (name == "svd") return NormMethod::svd;
    if (name == "power" || name == "power-iteration") return NormMethod::power_iteration;
    throw ParseError("unknown norm method '" + std::string(name) + "'");
}

/// Dense SVD up to this truncation level, power iteration above it.
inline constexpr int dense_svd_level_limit = 1024;

inline NormMethod default_method_for_level(int level)
{
    return level <= dense_svd_level_limit ? NormMethod::svd : NormMethod::power_iteration;
}

struct PowerIterationOptions {
    double tolerance = 1e-10;
    int max_iterations = 10000;
};

/// Largest singular value with the evidence behind it. For power iteration the
/// residual is ||A^*A v - lambda v|| / lambda at the last iterate; an estimate
/// that hit the iteration cap has converged == false.
struct NormEstimate {
    double value = 0.0;
    NormMethod method = NormMethod::svd;
    int iterations = 0;
    double residual = 0.0;
    bool converged = true;
};

namespace detail {

inline NormEstimate power_iteration_norm(const CMatrix& a, const PowerIterationOptions& options)
{
    NormEstimate estimate;
    estimate.method = NormMethod::power_iteration;
    const Eigen::Index n = a.cols();
    if (n == 0) {
        return estimate;
    }
    CVector v = CVector::Ones(n) / std::sqrt(static_cast<double>(n));
    double lambda = 0.0;
    double residual = 0.0;
    for (int it = 1; it <= options.max_iterations; ++it) {
        const CVector w = a.adjoint() * (a * v);
        lambda = v.dot(w).real();
        const double wn = w.norm();
        if (wn == 0.0) {
            // v lies in the kernel of A; the all-ones start only misses the
            // top singular vector when A vanishes on it.
            estimate.iterations = it;
            estimate.value = 0.0;
            estimate.residual = 0.0;
            estimate.converged = a.norm() == 0.0;
            return estimate;
        }
        residual = (w - lambda * v).norm() / std::max(lambda, std::numeric_limits<double>::min());
        estimate.iterations = it;
        if (residual < options.tolerance) {
            break;
        }
        v = w / wn;
    }
    estimate.value = std::sqrt(std::max(lambda, 0.0));
    estimate.residual = residual;
    estimate.converged = residual < options.tolerance;
    return estimate;
}

} // namespace detail

inline NormEstimate operator_norm(const CMatrix& a, NormMethod method = NormMethod::svd,
                                  const PowerIterationOptions& options = {})
{
    if (a.rows() != a.cols()) {
        throw PreconditionError("operator_norm expects a square matrix");
    }
    if (method == NormMethod::power_iteration) {
        return detail::power_iteration_norm(a, options);
    }
    NormEstimate estimate;
    if (a.size() > 0) {
        Eigen::BDCSVD<CMatrix> svd(a);
        estimate.value = svd.singularValues()(0);
    }
    return estimate;
}

inline NormEstimate operator_norm(const FiniteSectionOperator& a, NormMethod method = NormMethod::svd,
                                  const PowerIterationOptions& options = {})
{
    return operator_norm(a.matrix(), method, options);
}

/// Singular values in descending order; all of them when count is empty.
inline std::vector<double> singular_values(const CMatrix& a, std::optional<Eigen::Index> count = std::nullopt)
{
    if (a.size() == 0) {
        return {};
    }
    Eigen::BDCSVD<CMatrix> svd(a);
    const auto& s = svd.singularValues();
    const Eigen::Index k = std::min<Eigen::Index>(count.value_or(s.size()), s.size());
    std::vector<double> out(s.data(), s.data() + k);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

inline std::vector<double> singular_values(const FiniteSectionOperator& a,
                                           std::optional<Eigen::Index> count = std::nullopt)
{
    return singular_values(a.matrix(), count);
}

} // namespace toeplab
