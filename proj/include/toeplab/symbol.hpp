#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "toeplab/group_model.hpp"

namespace toeplab {

enum class SymbolSide { group, dual };

enum class SymbolFamily {
    constant,      ///< const:value=c
    trig,          ///< trig:a<n>=re,b<n>=im  (sum of c_n e^{i n theta}, circle only)
    gauss,         ///< gauss:center=c,width=w[,height=a]  a*exp(-((t-c)/w)^2)
    tail,          ///< tail:width=w  1 - 1/(1+(t/w)^2), tends to 1 at infinity (line only)
    dual_constant, ///< dual-const:value=c on the positive cone
    dual_gauss,    ///< dual-gauss:center=c,width=w[,height=a] on the positive cone
    dual_tail,     ///< dual-tail:width=w  xi/(xi+w) on the positive cone
};

/// Gaussian bumps are cut to exactly zero where they drop below this level.
inline constexpr double bump_truncation = 1e-12;
/// Largest tail a decaying symbol may leave outside the represented grid.
inline constexpr double aliasing_tolerance = 1e-12;

/// A closed-form parametric symbol on the group (phi in C(G-dot)) or on the
/// positive cone of the dual (theta in C(Gamma+-dot)). Dual symbols are
/// extended by zero to the negative half.
class SymbolSpec {
public:
    static SymbolSpec constant(double value) { return SymbolSpec(SymbolFamily::constant, {value}); }

    static SymbolSpec trig(std::map<int, cplx> coefficients)
    {
        SymbolSpec s(SymbolFamily::trig, {});
        for (const auto& [n, c] : coefficients) {
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
                throw ParseError("non-finite trig coefficient");
            }
        }
        s.coefficients_ = std::move(coefficients);
        return s;
    }

    static SymbolSpec gauss(double center, double width, double height = 1.0)
    {
        require_width(width);
        return SymbolSpec(SymbolFamily::gauss, {center, width, height});
    }

    static SymbolSpec tail(double width)
    {
        require_width(width);
        return SymbolSpec(SymbolFamily::tail, {width});
    }

    static SymbolSpec dual_constant(double value) { return SymbolSpec(SymbolFamily::dual_constant, {value}); }

    static SymbolSpec dual_gauss(double center, double width, double height = 1.0)
    {
        require_width(width);
        return SymbolSpec(SymbolFamily::dual_gauss, {center, width, height});
    }

    static SymbolSpec dual_tail(double width)
    {
        require_width(width);
        return SymbolSpec(SymbolFamily::dual_tail, {width});
    }

    static SymbolSpec parse(std::string_view source);
    std::string to_string() const;

    SymbolFamily family() const noexcept { return family_; }

    SymbolSide side() const noexcept
    {
        switch (family_) {
        case SymbolFamily::dual_constant:
        case SymbolFamily::dual_gauss:
        case SymbolFamily::dual_tail:
            return SymbolSide::dual;
        default:
            return SymbolSide::group;
        }
    }

    const std::map<int, cplx>& coefficients() const noexcept { return coefficients_; }

    /// Largest |n| with a nonzero trig coefficient.
    int degree() const noexcept
    {
        int d = 0;
        for (const auto& [n, c] : coefficients_) {
            if (c != cplx{0.0, 0.0}) {
                d = std::max(d, std::abs(n));
            }
        }
        return d;
    }

    double center() const noexcept { return is_bump() ? params_[0] : 0.0; }
    double width() const noexcept
    {
        if (is_bump()) {
            return params_[1];
        }
        return (family_ == SymbolFamily::tail || family_ == SymbolFamily::dual_tail) ? params_[0] : 0.0;
    }
    double height() const noexcept { return is_bump() ? params_[2] : 0.0; }
    double constant_value() const noexcept
    {
        return (family_ == SymbolFamily::constant || family_ == SymbolFamily::dual_constant) ? params_[0] : 0.0;
    }

    bool is_bump() const noexcept
    {
        return family_ == SymbolFamily::gauss || family_ == SymbolFamily::dual_gauss;
    }

    /// Compact support (up to the bump truncation) on its side.
    bool compactly_supported() const noexcept { return is_bump(); }

    /// Pointwise value at a group coordinate (angle on the circle) or a dual
    /// coordinate, depending on side().
    cplx operator()(double x) const;

    /// Untruncated value, used for tail bounds and aliasing checks.
    double envelope(double x) const;

    /// Limit at the point at infinity, when the model has one.
    std::optional<cplx> value_at_infinity(const GroupModel& model) const;

    /// Analytic upper bound on |value at the grid boundary - value at infinity|.
    double tail_bound(const GroupModel& model) const;

    /// Upper bound on the sup norm (exact for every family but multi-term trig).
    double sup_bound() const;

    /// The symbol of the adjoint: conj(phi).
    SymbolSpec conjugate() const;

    friend bool operator==(const SymbolSpec& a, const SymbolSpec& b)
    {
        return a.family_ == b.family_ && a.params_ == b.params_ && a.coefficients_ == b.coefficients_;
    }

private:
    SymbolSpec(SymbolFamily family, std::vector<double> params)
        : family_(family), params_(std::move(params))
    {
        for (double p : params_) {
            if (!std::isfinite(p)) {
                throw ParseError("non-finite symbol parameter");
            }
        }
    }

    static void require_width(double width)
    {
        if (!(width > 0.0) || !std::isfinite(width)) {
            throw ParseError("symbol width must be positive");
        }
    }

    SymbolFamily family_;
    std::vector<double> params_;
    std::map<int, cplx> coefficients_;
};

inline std::string family_name(SymbolFamily family)
{
    switch (family) {
    case SymbolFamily::constant: return "const";
    case SymbolFamily::trig: return "trig";
    case SymbolFamily::gauss: return "gauss";
    case SymbolFamily::tail: return "tail";
    case SymbolFamily::dual_constant: return "dual-const";
    case SymbolFamily::dual_gauss: return "dual-gauss";
    case SymbolFamily::dual_tail: return "dual-tail";
    }
    return "?";
}

inline SymbolSpec SymbolSpec::parse(std::string_view source)
{
    const auto spec = text::parse_key_value_spec(source);
    std::map<std::string, double> values;
    std::map<int, cplx> coefficients;
    const bool is_trig = spec.name == "trig";
    for (const auto& [key, raw] : spec.entries) {
        const double v = text::parse_double(raw);
        if (is_trig) {
            if (key.size() < 2 || (key[0] != 'a' && key[0] != 'b')) {
                throw ParseError("trig parameters are a<n> / b<n>, got '" + key + "'");
            }
            const auto n = text::parse_integer(std::string_view(key).substr(1));
            if (std::abs(n) > (1 << 20)) {
                throw ParseError("trig degree out of range");
            }
            auto& c = coefficients[static_cast<int>(n)];
            c = key[0] == 'a' ? cplx{v, c.imag()} : cplx{c.real(), v};
        } else {
            values[key] = v;
        }
    }
    auto take = [&](const char* key, std::optional<double> fallback = std::nullopt) {
        const auto it = values.find(key);
        if (it == values.end()) {
            if (!fallback) {
                throw ParseError("symbol '" + spec.name + "' requires " + key);
            }
            return *fallback;
        }
        const double v = it->second;
        values.erase(it);
        return v;
    };
    auto finish = [&](SymbolSpec s) {
        if (!values.empty()) {
            throw ParseError("unknown parameter '" + values.begin()->first + "' for '" + spec.name + "'");
        }
        return s;
    };
    if (is_trig) {
        return trig(std::move(coefficients));
    }
    if (spec.name == "const") {
        return finish(constant(take("value")));
    }
    if (spec.name == "dual-const") {
        return finish(dual_constant(take("value")));
    }
    if (spec.name == "gauss" || spec.name == "dual-gauss") {
        const double c = take("center");
        const double w = take("width");
        const double a = take("height", 1.0);
        return finish(spec.name == "gauss" ? gauss(c, w, a) : dual_gauss(c, w, a));
    }
    if (spec.name == "tail") {
        return finish(tail(take("width")));
    }
    if (spec.name == "dual-tail") {
        return finish(dual_tail(take("width")));
    }
    throw ParseError("unknown symbol family '" + spec.name + "'");
}

inline std::string SymbolSpec::to_string() const
{
    using text::format_double;
    std::string out = family_name(family_) + ":";
    switch (family_) {
    case SymbolFamily::constant:
    case SymbolFamily::dual_constant:
        out += "value=" + format_double(params_[0]);
        break;
    case SymbolFamily::trig: {
        bool first = true;
        for (const auto& [n, c] : coefficients_) {
            out += (first ? "a" : ",a") + std::to_string(n) + "=" + format_double(c.real());
            if (c.imag() != 0.0) {
                out += ",b" + std::to_string(n) + "=" + format_double(c.imag());
            }
            first = false;
        }
        break;
    }
    case SymbolFamily::gauss:
    case SymbolFamily::dual_gauss:
        out += "center=" + format_double(params_[0]) + ",width=" + format_double(params_[1]);
        if (params_[2] != 1.0) {
            out += ",height=" + format_double(params_[2]);
        }
        break;
    case SymbolFamily::tail:
    case SymbolFamily::dual_tail:
        out += "width=" + format_double(params_[0]);
        break;
    }
    return out;
}

namespace detail {

/// Angle difference wrapped into (-pi, pi].
inline double wrap_angle(double a)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a > std::numbers::pi) {
        a -= two_pi;
    } else if (a <= -std::numbers::pi) {
        a += two_pi;
    }
    return a;
}

} // namespace detail

inline double SymbolSpec::envelope(double x) const
{
    switch (family_) {
    case SymbolFamily::gauss:
    case SymbolFamily::dual_gauss: {
        const double z = (x - params_[0]) / params_[1];
        return std::abs(params_[2]) * std::exp(-z * z);
    }
    default:
        return std::abs((*this)(x));
    }
}

inline cplx SymbolSpec::operator()(double x) const
{
    switch (family_) {
    case SymbolFamily::constant:
        return params_[0];
    case SymbolFamily::trig: {
        cplx sum{0.0, 0.0};
        for (const auto& [n, c] : coefficients_) {
            sum += c * std::polar(1.0, n * x);
        }
        return sum;
    }
    case SymbolFamily::gauss:
    case SymbolFamily::dual_gauss: {
        if (family_ == SymbolFamily::dual_gauss && x < 0.0) {
            return 0.0;
        }
        const double z = (x - params_[0]) / params_[1];
        const double g = std::exp(-z * z);
        return g < bump_truncation ? 0.0 : params_[2] * g;
    }
    case SymbolFamily::tail: {
        const double z = x / params_[0];
        return 1.0 - 1.0 / (1.0 + z * z);
    }
    case SymbolFamily::dual_constant:
        return x < 0.0 ? 0.0 : params_[0];
    case SymbolFamily::dual_tail:
        return x < 0.0 ? 0.0 : x / (x + params_[0]);
    }
    return 0.0;
}

inline std::optional<cplx> SymbolSpec::value_at_infinity(const GroupModel& model) const
{
    if (side() == SymbolSide::group && model.is_circle()) {
        return std::nullopt;
    }
    switch (family_) {
    case SymbolFamily::constant:
    case SymbolFamily::dual_constant:
        return cplx{params_[0], 0.0};
    case SymbolFamily::gauss:
    case SymbolFamily::dual_gauss:
        return cplx{0.0, 0.0};
    case SymbolFamily::tail:
    case SymbolFamily::dual_tail:
        return cplx{1.0, 0.0};
    case SymbolFamily::trig:
        return std::nullopt;
    }
    return std::nullopt;
}

inline double SymbolSpec::tail_bound(const GroupModel& model) const
{
    const double t_first = model.group_point(0);
    const double t_last = model.group_point(model.samples() - 1);
    const double xi_top = model.max_frequency() * model.dual_spacing();
    switch (family_) {
    case SymbolFamily::gauss:
        return model.is_circle() ? 0.0 : std::max(envelope(t_first), envelope(t_last));
    case SymbolFamily::tail: {
        const double reach = std::min(std::abs(t_first), std::abs(t_last)) / params_[0];
        return 1.0 / (1.0 + reach * reach);
    }
    case SymbolFamily::dual_gauss:
        return envelope(xi_top);
    case SymbolFamily::dual_tail:
        return params_[0] / (xi_top + params_[0]);
    default:
        return 0.0;
    }
}

inline double SymbolSpec::sup_bound() const
{
    switch (family_) {
    case SymbolFamily::trig: {
        double s = 0.0;
        for (const auto& [n, c] : coefficients_) {
            s += std::abs(c);
        }
        return s;
    }
    case SymbolFamily::constant:
    case SymbolFamily::dual_constant:
        return std::abs(params_[0]);
    case SymbolFamily::gauss:
    case SymbolFamily::dual_gauss:
        return std::abs(params_[2]);
    case SymbolFamily::tail:
    case SymbolFamily::dual_tail:
        return 1.0;
    }
    return 0.0;
}

inline SymbolSpec SymbolSpec::conjugate() const
{
    if (family_ != SymbolFamily::trig) {
        return *this;
    }
    std::map<int, cplx> conj;
    for (const auto& [n, c] : coefficients_) {
        conj[-n] = std::conj(c);
    }
    return trig(std::move(conj));
}

/// Exact product inside the family algebra, when the families allow one.
inline std::optional<SymbolSpec> exact_product(const SymbolSpec& a, const SymbolSpec& b)
{
    auto as_trig = [](const SymbolSpec& s) -> std::optional<std::map<int, cplx>> {
        if (s.family() == SymbolFamily::trig) {
            return s.coefficients();
        }
        if (s.family() == SymbolFamily::constant) {
            return std::map<int, cplx>{{0, cplx{s.constant_value(), 0.0}}};
        }
        return std::nullopt;
    };
    const auto pa = as_trig(a);
    const auto pb = as_trig(b);
    if (!pa || !pb) {
        return std::nullopt;
    }
    if (a.family() == SymbolFamily::constant && b.family() == SymbolFamily::constant) {
        return SymbolSpec::constant(a.constant_value() * b.constant_value());
    }
    std::map<int, cplx> product;
    for (const auto& [n, c] : *pa) {
        for (const auto& [m, d] : *pb) {
            product[n + m] += c * d;
        }
    }
    return SymbolSpec::trig(std::move(product));
}

namespace detail {

inline void require_defined_on(const SymbolSpec& s, const GroupModel& model)
{
    if (s.family() == SymbolFamily::trig && !model.is_circle()) {
        throw UnsupportedModel("trig symbols are defined on the circle model only");
    }
    if (s.family() == SymbolFamily::tail && !model.is_line()) {
        throw UnsupportedModel("tail symbols need a point at infinity (line model only)");
    }
}

} // namespace detail

/// phi(t_j) on the group grid.
inline GridFunction evaluate_on_group(const SymbolSpec& s, const GroupModel& model)
{
    if (s.side() != SymbolSide::group) {
        throw SideError("'" + s.to_string() + "' is a dual-side symbol");
    }
    detail::require_defined_on(s, model);
    CVector v(model.samples());
    for (int j = 0; j < model.samples(); ++j) {
        double x = model.group_point(j);
        if (model.is_circle() && s.family() == SymbolFamily::gauss) {
            x = s.center() + detail::wrap_angle(x - s.center());
        }
        v(j) = s(x);
    }
    return {model, std::move(v)};
}

/// theta(gamma_d) on the dual grid, zero on the negative half.
inline DualGridFunction evaluate_on_dual(const SymbolSpec& s, const GroupModel& model)
{
    if (s.side() != SymbolSide::dual) {
        throw SideError("'" + s.to_string() + "' is a group-side symbol");
    }
    CVector v(model.dual_size());
    for (int d = 0; d < model.dual_size(); ++d) {
        v(d) = model.in_positive_cone(d) ? s(model.dual_point(d)) : cplx{0.0, 0.0};
    }
    return {model, std::move(v)};
}

using EvaluatedSymbol = std::variant<GridFunction, DualGridFunction>;

inline EvaluatedSymbol evaluate_symbol(const SymbolSpec& s, SymbolSide side, const GroupModel& model)
{
    if (side == SymbolSide::group) {
        return evaluate_on_group(s, model);
    }
    return evaluate_on_dual(s, model);
}

/// Rejects symbols whose tails leave more than the aliasing tolerance outside
/// the represented grid.
inline void check_representable(const SymbolSpec& s, const GroupModel& model)
{
    detail::require_defined_on(s, model);
    auto reject = [&](const std::string& why) {
        throw AliasingError(s.to_string(), "symbol '" + s.to_string() + "' on " + model.to_string() + ": " + why);
    };
    switch (s.family()) {
    case SymbolFamily::trig:
        if (s.degree() >= model.samples() - model.modes()) {
            reject("trig degree " + std::to_string(s.degree()) + " aliases onto represented modes");
        }
        break;
    case SymbolFamily::gauss: {
        // spectral tail of a*exp(-(t/w)^2) is a*exp(-(xi w / 2)^2)
        const double nyquist = std::numbers::pi / model.spacing();
        const double z = nyquist * s.width() / 2.0;
        if (std::abs(s.height()) * std::exp(-z * z) >= aliasing_tolerance) {
            reject("spectrum not resolved by the sampling step");
        }
        const double edge = model.is_circle() ? s.envelope(s.center() + std::numbers::pi) : s.tail_bound(model);
        if (edge >= aliasing_tolerance) {
            reject("bump does not fit inside the sampling window");
        }
        break;
    }
    case SymbolFamily::dual_gauss: {
        if (s.tail_bound(model) >= aliasing_tolerance) {
            reject("bump extends past the top of the dual grid");
        }
        if (model.is_line()) {
            // the inverse transform of the bump decays like exp(-(t w / 2)^2)
            const double z = 0.5 * model.period() * s.width() / 2.0;
            if (std::abs(s.height()) * std::exp(-z * z) >= aliasing_tolerance) {
                reject("bump too narrow for the dual grid spacing");
            }
        }
        break;
    }
    default:
        break;
    }
}

} // namespace toeplab
