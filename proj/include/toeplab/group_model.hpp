#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "toeplab/error.hpp"
#include "toeplab/text.hpp"

namespace toeplab {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

enum class GroupKind { circle, line };

/// A discretized locally compact abelian group: the circle sampled at N
/// equispaced angles with modes -M..M represented, or the line periodized to
/// a window of N samples with spacing h.
///
/// Index conventions shared by every module:
///  - group samples j = 0..N-1 sit at 2*pi*j/N (circle) or (j - N/2)*h (line);
///  - the spectral grid has N bins, bin k carrying the integer frequency
///    m = k - floor(N/2) and the dual point m*dxi (dxi = 1 on the circle);
///  - the dual grid is the spectral grid on the line and the sub-range
///    m = -M..M on the circle;
///  - the Hardy bins are the frequencies m = 0, 1, ... up to the top of the
///    dual grid (M on the circle, N/2 - 1 on the line), so the Nyquist bin of
///    an even line grid falls on the negative side.
class GroupModel {
public:
    static GroupModel circle(int modes, int samples = 0)
    {
        if (samples == 0) {
            samples = 2 * modes + 1;
        }
        if (modes < 2) {
            throw ParseError("circle model needs M >= 2");
        }
        if (samples < 2 * modes + 1) {
            throw ParseError("circle model needs N >= 2M+1");
        }
        return GroupModel(GroupKind::circle, modes, samples, 2.0 * std::numbers::pi / samples);
    }

    static GroupModel line(int samples, double spacing)
    {
        if (samples < 8 || samples % 2 != 0) {
            throw ParseError("line model needs an even N >= 8");
        }
        if (!(spacing > 0.0) || !std::isfinite(spacing)) {
            throw ParseError("line model needs h > 0");
        }
        return GroupModel(GroupKind::line, 0, samples, spacing);
    }

    /// Line model with the given period, L = N*h.
    static GroupModel line_with_period(int samples, double period)
    {
        return line(samples, period / samples);
    }

    /// Parses `circle:M=..[,N=..]` or `line:N=..,h=..`.
    static GroupModel parse(std::string_view source)
    {
        const auto spec = text::parse_key_value_spec(source);
        auto lookup = [&](const std::string& key) -> const std::string* {
            for (const auto& [k, v] : spec.entries) {
                if (k == key) {
                    return &v;
                }
            }
            return nullptr;
        };
        auto check_keys = [&](std::initializer_list<std::string_view> allowed) {
            for (const auto& [k, v] : spec.entries) {
                bool known = false;
                for (auto a : allowed) {
                    known = known || k == a;
                }
                if (!known) {
                    throw ParseError("unknown model parameter '" + k + "'");
                }
            }
        };
        auto as_int = [](const std::string& v) {
            const auto n = text::parse_integer(v);
            if (n < 0 || n > (1 << 24)) {
                throw ParseError("size out of range: " + v);
            }
            return static_cast<int>(n);
        };
        if (spec.name == "circle") {
            check_keys({"M", "N"});
            const auto* m = lookup("M");
            if (m == nullptr) {
                throw ParseError("circle model requires M");
            }
            const auto* n = lookup("N");
            return circle(as_int(*m), n == nullptr ? 0 : as_int(*n));
        }
        if (spec.name == "line") {
            check_keys({"N", "h"});
            const auto* n = lookup("N");
            const auto* h = lookup("h");
            if (n == nullptr || h == nullptr) {
                throw ParseError("line model requires N and h");
            }
            return line(as_int(*n), text::parse_double(*h));
        }
        throw ParseError("unknown group model '" + spec.name + "'");
    }

    std::string to_string() const
    {
        if (is_circle()) {
            return "circle:M=" + std::to_string(modes_) + ",N=" + std::to_string(samples_);
        }
        return "line:N=" + std::to_string(samples_) + ",h=" + text::format_double(spacing_);
    }

    GroupKind kind() const noexcept { return kind_; }
    bool is_circle() const noexcept { return kind_ == GroupKind::circle; }
    bool is_line() const noexcept { return kind_ == GroupKind::line; }

    /// Represented modes M (circle only; 0 on the line).
    int modes() const noexcept { return modes_; }
    int samples() const noexcept { return samples_; }
    double spacing() const noexcept { return spacing_; }
    double period() const noexcept { return spacing_ * samples_; }
    double dual_spacing() const noexcept
    {
        return is_circle() ? 1.0 : 2.0 * std::numbers::pi / period();
    }

    /// Haar quadrature weight per sample: 1/N (normalized) or h.
    double group_weight() const noexcept { return is_circle() ? 1.0 / samples_ : spacing_; }
    /// Dual Haar weight per bin: counting measure or dxi/(2*pi).
    double dual_weight() const noexcept
    {
        return is_circle() ? 1.0 : dual_spacing() / (2.0 * std::numbers::pi);
    }

    /// Sample index of the group identity.
    int origin_index() const noexcept { return is_circle() ? 0 : samples_ / 2; }
    double group_point(int j) const noexcept
    {
        return is_circle() ? spacing_ * j : spacing_ * (j - samples_ / 2);
    }

    int spectral_size() const noexcept { return samples_; }
    int spectral_zero() const noexcept { return samples_ / 2; }
    int spectral_frequency(int k) const noexcept { return k - spectral_zero(); }

    int dual_size() const noexcept { return is_circle() ? 2 * modes_ + 1 : samples_; }
    /// Integer frequency of dual-grid bin d.
    int dual_frequency(int d) const noexcept { return is_circle() ? d - modes_ : d - samples_ / 2; }
    int dual_index_of_frequency(int m) const noexcept { return is_circle() ? m + modes_ : m + samples_ / 2; }
    double dual_point(int d) const noexcept { return dual_frequency(d) * dual_spacing(); }
    int min_frequency() const noexcept { return dual_frequency(0); }
    int max_frequency() const noexcept { return dual_frequency(dual_size() - 1); }
    bool in_positive_cone(int d) const noexcept { return dual_frequency(d) >= 0; }

    /// Number of Hardy bins: frequencies 0..max_frequency().
    int hardy_size() const noexcept { return max_frequency() + 1; }
    /// Spectral-grid bin of Hardy bin i.
    int hardy_spectral_index(int i) const noexcept { return spectral_zero() + i; }

    RVector group_grid() const
    {
        RVector t(samples_);
        for (int j = 0; j < samples_; ++j) {
            t(j) = group_point(j);
        }
        return t;
    }

    RVector dual_grid() const
    {
        RVector xi(dual_size());
        for (int d = 0; d < dual_size(); ++d) {
            xi(d) = dual_point(d);
        }
        return xi;
    }

    /// gamma_m(t_j) = exp(i m dxi t_j), with the phase reduced exactly mod N.
    cplx character(long long m, int j) const noexcept
    {
        const long long n = samples_;
        long long r = (m % n) * ((j - origin_index()) % n) % n;
        if (r < 0) {
            r += n;
        }
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
        return {std::cos(phase), std::sin(phase)};
    }

    /// Nearest sample index to t, or -1 when t lies outside the window.
    int nearest_group_index(double t) const noexcept
    {
        const double x = is_circle() ? t / spacing_ : t / spacing_ + samples_ / 2;
        const double r = std::round(x);
        if (is_circle()) {
            const auto n = static_cast<long long>(r);
            return static_cast<int>(((n % samples_) + samples_) % samples_);
        }
        if (r < 0 || r > samples_ - 1) {
            return -1;
        }
        return static_cast<int>(r);
    }

    friend bool operator==(const GroupModel& a, const GroupModel& b) noexcept
    {
        return a.kind_ == b.kind_ && a.modes_ == b.modes_ && a.samples_ == b.samples_
            && a.spacing_ == b.spacing_;
    }

private:
    GroupModel(GroupKind kind, int modes, int samples, double spacing)
        : kind_(kind), modes_(modes), samples_(samples), spacing_(spacing)
    {
    }

    GroupKind kind_;
    int modes_;
    int samples_;
    double spacing_;
};

namespace detail {

inline void require_finite(const CVector& v, const char* what)
{
    if (!v.allFinite()) {
        throw PreconditionError(std::string(what) + " has non-finite entries");
    }
}

} // namespace detail

/// Samples of f in L^2(G) on the model's group grid.
class GridFunction {
public:
    GridFunction(GroupModel model, CVector values) : model_(std::move(model)), values_(std::move(values))
    {
        if (values_.size() != model_.samples()) {
            throw ModelMismatch("grid function length " + std::to_string(values_.size())
                                + " does not match " + model_.to_string());
        }
        detail::require_finite(values_, "grid function");
    }

    const GroupModel& model() const noexcept { return model_; }
    const CVector& values() const noexcept { return values_; }

    /// L^2(G) norm under the model's Haar weights.
    double l2_norm() const { return std::sqrt(model_.group_weight()) * values_.norm(); }

private:
    GroupModel model_;
    CVector values_;
};

/// Values of a function in L^2(Gamma) on the model's dual grid.
class DualGridFunction {
public:
    DualGridFunction(GroupModel model, CVector values) : model_(std::move(model)), values_(std::move(values))
    {
        if (values_.size() != model_.dual_size()) {
            throw ModelMismatch("dual grid function length " + std::to_string(values_.size())
                                + " does not match " + model_.to_string());
        }
        detail::require_finite(values_, "dual grid function");
    }

    const GroupModel& model() const noexcept { return model_; }
    const CVector& values() const noexcept { return values_; }

    double l2_norm() const { return std::sqrt(model_.dual_weight()) * values_.norm(); }

private:
    GroupModel model_;
    CVector values_;
};

namespace detail {

/// Unscaled DFT: X_k = sum_j x_j exp(-+2 pi i j k / N).
inline std::vector<cplx> dft(const std::vector<cplx>& in, bool inverse)
{
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<cplx> out;
    if (inverse) {
        fft.inv(out, in);
    } else {
        fft.fwd(out, in);
    }
    return out;
}

inline int wrap_index(long long m, int n)
{
    return static_cast<int>(((m % n) + n) % n);
}

inline double parity_sign(long long m) { return (m % 2 == 0) ? 1.0 : -1.0; }

} // namespace detail

/// f^(gamma) = integral of conj(gamma(t)) f(t) dlambda(t), by the model's quadrature.
inline DualGridFunction forward_fourier(const GridFunction& f)
{
    const auto& model = f.model();
    const int n = model.samples();
    std::vector<cplx> in(f.values().data(), f.values().data() + n);
    const auto spectrum = detail::dft(in, false);
    CVector out(model.dual_size());
    for (int d = 0; d < model.dual_size(); ++d) {
        const int m = model.dual_frequency(d);
        const cplx x = spectrum[detail::wrap_index(m, n)];
        out(d) = model.is_circle() ? x / static_cast<double>(n)
                                   : model.spacing() * detail::parity_sign(m) * x;
    }
    return {model, std::move(out)};
}

/// f(t) = integral over the dual of gamma(t) g(gamma) dlambda~(gamma).
inline GridFunction inverse_fourier(const DualGridFunction& g)
{
    const auto& model = g.model();
    const int n = model.samples();
    std::vector<cplx> in(n, cplx{0.0, 0.0});
    for (int d = 0; d < model.dual_size(); ++d) {
        const int m = model.dual_frequency(d);
        in[detail::wrap_index(m, n)] = model.is_circle() ? g.values()(d)
                                                         : detail::parity_sign(m) * g.values()(d);
    }
    const auto samples = detail::dft(in, true);
    CVector out(n);
    const double scale = model.dual_weight();
    for (int j = 0; j < n; ++j) {
        out(j) = scale * samples[j];
    }
    return {model, std::move(out)};
}

/// Orthonormal N x N matrix taking sample coordinates to spectral-grid
/// coordinates: U(k, j) = conj(gamma_{m_k}(t_j)) / sqrt(N).
inline CMatrix unitary_fourier_matrix(const GroupModel& model)
{
    const int n = model.samples();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CMatrix u(n, n);
    for (int k = 0; k < n; ++k) {
        const int m = model.spectral_frequency(k);
        for (int j = 0; j < n; ++j) {
            u(k, j) = std::conj(model.character(m, j)) * scale;
        }
    }
    return u;
}

} // namespace toeplab
