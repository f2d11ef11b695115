#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "toeplab/norms.hpp"
#include "toeplab/operators.hpp"

namespace toeplab {

// ---------------------------------------------------------------------------
// Truncation schedules and level models

inline void validate_schedule(std::span<const int> schedule, std::size_t minimum_levels = 1)
{
    if (schedule.size() < minimum_levels) {
        throw InsufficientEvidence("schedule has " + std::to_string(schedule.size()) + " levels, at least "
                                   + std::to_string(minimum_levels) + " required");
    }
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] <= 0 || (i > 0 && schedule[i] <= schedule[i - 1])) {
            throw PreconditionError("schedule must be strictly increasing and positive");
        }
    }
}

/// The model at truncation level n: circle:M=n,N=2n+1, or a line with the
/// base period and N = n samples.
inline GroupModel refine_model(const GroupModel& base, int level)
{
    if (base.is_circle()) {
        return GroupModel::circle(level, 2 * level + 1);
    }
    return GroupModel::line_with_period(level, base.period());
}

// ---------------------------------------------------------------------------
// Commutators

namespace detail {

inline GridFunction product_samples(const SymbolSpec& phi, const SymbolSpec& psi, const GroupModel& model)
{
    const auto a = evaluate_on_group(phi, model);
    const auto b = evaluate_on_group(psi, model);
    return {model, a.values().cwiseProduct(b.values())};
}

} // namespace detail

/// T_phi T_psi - T_psi T_phi.
inline FiniteSectionOperator commutator(const GroupModel& model, const SymbolSpec& phi, const SymbolSpec& psi)
{
    const auto tp = toeplitz_operator(model, phi);
    const auto tq = toeplitz_operator(model, psi);
    return add(compose(tp, tq), compose(tq, tp), 1.0, -1.0);
}

/// T_{phi psi} - T_psi T_phi. The product symbol is formed exactly for
/// trig/constant symbols and on the grid otherwise.
inline FiniteSectionOperator semi_commutator(const GroupModel& model, const SymbolSpec& phi, const SymbolSpec& psi)
{
    const auto tp = toeplitz_operator(model, phi);
    const auto tq = toeplitz_operator(model, psi);
    const auto product = exact_product(phi, psi);
    const auto tpq = product ? toeplitz_operator(model, *product)
                             : toeplitz_from_samples(detail::product_samples(phi, psi, model));
    return add(tpq, compose(tq, tp), 1.0, -1.0);
}

enum class CommutatorKind { commutator, semi_commutator };

inline std::string kind_name(CommutatorKind k)
{
    return k == CommutatorKind::commutator ? "commutator" : "semi-commutator";
}

// ---------------------------------------------------------------------------
// Hilbert-Schmidt kernel of D_theta~ M_phi

/// Kernel k(t, tau) = phi(tau) theta-check(t - tau) of D_theta~ M_phi on the
/// sample grid, with its Hilbert-Schmidt norm and the a-priori bound
/// sqrt(||phi||_inf^2 ||theta||_2^2 lambda(K1)).
struct HSKernel {
    GroupModel model;
    CMatrix values;
    double hs_norm = 0.0;
    double bound = 0.0;
    double phi_sup = 0.0;
    double theta_l2 = 0.0;
    /// lambda(K1): h times the number of samples where |phi| > 1e-12.
    double support_measure = 0.0;
};

inline HSKernel hs_kernel(const GroupModel& model, const SymbolSpec& phi, const SymbolSpec& theta)
{
    if (!model.is_line()) {
        throw UnsupportedModel("hs_kernel is defined on the line model");
    }
    detail::require_group_symbol(phi);
    detail::require_dual_symbol(theta);
    if (!phi.compactly_supported() || !theta.compactly_supported()) {
        throw PreconditionError("hs_kernel needs compactly supported symbols");
    }
    check_representable(phi, model);
    check_representable(theta, model);

    const auto phi_values = evaluate_on_group(phi, model);
    const auto theta_values = evaluate_on_dual(theta, model);
    const auto theta_check = inverse_fourier(theta_values);
    const int n = model.samples();
    const int o = model.origin_index();

    HSKernel kernel{model, CMatrix(n, n)};
    for (int l = 0; l < n; ++l) {
        const cplx p = phi_values.values()(l);
        for (int j = 0; j < n; ++j) {
            kernel.values(j, l) = p * theta_check.values()(detail::wrap_index(static_cast<long long>(j) - l + o, n));
        }
    }
    const double h = model.spacing();
    kernel.hs_norm = kernel.values.norm() * h;
    kernel.phi_sup = phi_values.values().cwiseAbs().maxCoeff();
    kernel.theta_l2 = theta_values.l2_norm();
    int support = 0;
    for (int l = 0; l < n; ++l) {
        support += std::abs(phi_values.values()(l)) > bump_truncation ? 1 : 0;
    }
    kernel.support_measure = support * h;
    kernel.bound = std::sqrt(kernel.phi_sup * kernel.phi_sup * kernel.theta_l2 * kernel.theta_l2
                             * kernel.support_measure);
    return kernel;
}

/// The integral operator f -> sum_l k(t, tau_l) f(tau_l) h in the sample basis.
inline FiniteSectionOperator kernel_operator(const HSKernel& kernel)
{
    return {kernel.model, Basis::l2_sample, kernel.values * kernel.model.spacing()};
}

// ---------------------------------------------------------------------------
// Separation of compact sets

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

inline void validate_intervals(std::span<const Interval> k, const char* name)
{
    if (k.empty()) {
        throw PreconditionError(std::string(name) + " is empty");
    }
    for (const auto& i : k) {
        if (!std::isfinite(i.lo) || !std::isfinite(i.hi) || i.lo > i.hi) {
            throw PreconditionError(std::string(name) + " contains an invalid interval");
        }
    }
}

inline std::vector<Interval> translate(std::span<const Interval> k, double t)
{
    std::vector<Interval> out;
    out.reserve(k.size());
    for (const auto& i : k) {
        out.push_back({i.lo + t, i.hi + t});
    }
    return out;
}

inline bool intervals_disjoint(std::span<const Interval> a, std::span<const Interval> b)
{
    for (const auto& x : a) {
        for (const auto& y : b) {
            if (x.lo <= y.hi && y.lo <= x.hi) {
                return false;
            }
        }
    }
    return true;
}

/// t0 with K1 and t0 + K2 disjoint: t0 = sup K1 - inf K2 + 1. Needs a
/// non-compact group.
inline double separate_compacts(const GroupModel& model, std::span<const Interval> k1, std::span<const Interval> k2)
{
    if (!model.is_line()) {
        throw UnsupportedModel("compact sets of a compact group cannot be translated apart");
    }
    validate_intervals(k1, "K1");
    validate_intervals(k2, "K2");
    double sup1 = -std::numeric_limits<double>::infinity();
    double inf2 = std::numeric_limits<double>::infinity();
    for (const auto& i : k1) {
        sup1 = std::max(sup1, i.hi);
    }
    for (const auto& i : k2) {
        inf2 = std::min(inf2, i.lo);
    }
    const double t0 = sup1 - inf2 + 1.0;
    if (!intervals_disjoint(k1, translate(k2, t0))) {
        throw Error("separation failed to produce disjoint sets");
    }
    return t0;
}

// ---------------------------------------------------------------------------
// Witness operators

namespace detail {

inline long long grid_multiple(double x, double step, const char* what)
{
    const double r = x / step;
    const double n = std::round(r);
    if (std::abs(r - n) > 1e-9 * std::max(1.0, std::abs(r))) {
        throw OffGridError(std::string(what) + " " + text::format_double(x) + " is not a multiple of the grid step "
                           + text::format_double(step));
    }
    return static_cast<long long>(n);
}

} // namespace detail

/// gamma_m(t_j) on the group grid.
inline GridFunction character_samples(const GroupModel& model, long long m)
{
    CVector v(model.samples());
    for (int j = 0; j < model.samples(); ++j) {
        v(j) = model.character(m, j);
    }
    return {model, std::move(v)};
}

/// S_gamma0 on L^2(Gamma+): (S f)(gamma) = f(gamma - gamma0), as a Hardy
/// section. Columns whose image leaves the window are zero.
inline FiniteSectionOperator modulation_witness(const GroupModel& model, double gamma0)
{
    const long long shift = detail::grid_multiple(gamma0, model.dual_spacing(), "gamma0");
    if (shift < 0) {
        throw PreconditionError("gamma0 must lie in the positive cone");
    }
    const int h = model.hardy_size();
    if (shift >= h) {
        throw OffGridError("gamma0 lies beyond the represented dual grid");
    }
    CMatrix s = CMatrix::Zero(h, h);
    for (int i = 0; i + shift < h; ++i) {
        s(i + shift, i) = 1.0;
    }
    return {model, Basis::hardy_fourier, std::move(s)};
}

/// S_t0: (S f)(t) = f(t - t0), a cyclic shift of the periodized line.
inline FiniteSectionOperator translation_witness(const GroupModel& model, double t0)
{
    if (!model.is_line()) {
        throw UnsupportedModel("translation_witness is defined on the line model");
    }
    const long long shift = detail::grid_multiple(t0, model.spacing(), "t0");
    const int n = model.samples();
    CMatrix s = CMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        s(j, detail::wrap_index(j - shift, n)) = 1.0;
    }
    return {model, Basis::l2_sample, std::move(s)};
}

/// The multiplier exp(-i xi t0) of translation by t0, in the l2-fourier basis.
inline FiniteSectionOperator translation_multiplier(const GroupModel& model, double t0)
{
    const long long shift = detail::grid_multiple(t0, model.spacing(), "t0");
    const int n = model.samples();
    CVector d(n);
    for (int k = 0; k < n; ++k) {
        d(k) = std::conj(model.character(model.spectral_frequency(k), detail::wrap_index(shift + model.origin_index(), n)));
    }
    return {model, Basis::l2_fourier, d.asDiagonal()};
}

/// Constructive lower bound for the point (infinity, gamma): a unit vector g
/// in H^2 with ||D_theta~ g|| >= 1 - eps, a compact K2 holding 1 - eps of its
/// mass, K1 where phi < 1 - eps, and the translate S_t0 g with K1, t0 + K2
/// disjoint. The bound ||D_theta~ M_phi S_t0 g|| >= 1 - 3 eps is reproduced up
/// to the slack.
struct TranslationWitnessReport {
    double epsilon = 0.0;
    double gamma = 0.0;
    double packet_width = 0.0;
    double multiplier_mass = 0.0;
    Interval k1;
    Interval k2;
    double k2_mass = 0.0;
    double t0 = 0.0;
    double localization_defect = 0.0;
    double achieved = 0.0;
    double lower_bound = 0.0;
    double slack = 0.0;
    bool holds = false;
};

inline TranslationWitnessReport reproduce_translation_witness(const GroupModel& model, double gamma, double epsilon,
                                                              double dual_bump_width, double group_tail_width,
                                                              double slack = 0.01)
{
    if (!model.is_line()) {
        throw UnsupportedModel("the translation witness needs a non-compact group");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0 / 3.0)) {
        throw PreconditionError("epsilon must lie in (0, 1/3)");
    }
    if (gamma < 0.0) {
        throw PreconditionError("gamma must lie in the positive cone");
    }
    const double dxi = model.dual_spacing();
    const long long m = std::llround(gamma / dxi);
    const double center = m * dxi;
    const auto theta = SymbolSpec::dual_gauss(center, dual_bump_width);
    const auto phi = SymbolSpec::tail(group_tail_width);
    check_representable(theta, model);
    const auto theta_values = evaluate_on_dual(theta, model).values();

    TranslationWitnessReport r;
    r.epsilon = epsilon;
    r.gamma = center;
    r.slack = slack;

    // Gaussian wave packet on the positive cone, narrowed until D_theta~ keeps 1 - eps.
    CVector packet(model.dual_size());
    double width = dual_bump_width;
    for (int attempt = 0;; ++attempt) {
        for (int d = 0; d < model.dual_size(); ++d) {
            const double xi = model.dual_point(d);
            const double z = (xi - center) / width;
            packet(d) = model.in_positive_cone(d) ? std::exp(-z * z) : 0.0;
        }
        packet /= DualGridFunction(model, packet).l2_norm();
        r.multiplier_mass = DualGridFunction(model, theta_values.cwiseProduct(packet)).l2_norm();
        if (r.multiplier_mass >= 1.0 - epsilon) {
            break;
        }
        width /= 1.25;
        if (width < 2.0 * dxi || attempt > 200) {
            throw PreconditionError("dual grid too coarse to build a packet concentrated under theta");
        }
    }
    r.packet_width = width;
    const auto g = inverse_fourier(DualGridFunction(model, packet));

    // K2 = [-r, r], grown one sample at a time until it holds 1 - eps of the mass.
    const int n = model.samples();
    const int o = model.origin_index();
    const double h = model.spacing();
    const double w = model.group_weight();
    double mass = std::norm(g.values()(o)) * w;
    int radius = 0;
    while (std::sqrt(mass) < 1.0 - epsilon) {
        ++radius;
        if (o - radius < 0 || o + radius >= n) {
            throw PreconditionError("window too small to hold the packet");
        }
        mass += (std::norm(g.values()(o - radius)) + std::norm(g.values()(o + radius))) * w;
    }
    r.k2 = {-radius * h, radius * h};
    r.k2_mass = std::sqrt(mass);

    // K1 = closure of {phi < 1 - eps}.
    const double a = group_tail_width * std::sqrt(1.0 / epsilon - 1.0);
    r.k1 = {-a, a};

    const std::vector<Interval> k1{r.k1};
    const std::vector<Interval> k2{r.k2};
    const double t0 = separate_compacts(model, k1, k2);
    r.t0 = std::ceil(t0 / h) * h;
    if (r.t0 + r.k2.hi >= model.group_point(n - 1) || !intervals_disjoint(k1, translate(k2, r.t0))) {
        throw PreconditionError("window too small for the translated packet");
    }

    const auto shifted = toeplab::apply(translation_witness(model, r.t0), g.values());
    const auto phi_values = evaluate_on_group(phi, model).values();
    const GridFunction f(model, shifted);
    const GridFunction phi_f(model, phi_values.cwiseProduct(shifted));
    r.localization_defect = GridFunction(model, shifted - phi_f.values()).l2_norm();
    const auto spectrum = forward_fourier(phi_f).values();
    r.achieved = DualGridFunction(model, theta_values.cwiseProduct(spectrum)).l2_norm() / f.l2_norm();
    r.lower_bound = 1.0 - 3.0 * epsilon;
    r.holds = r.achieved >= r.lower_bound - slack;
    return r;
}

// ---------------------------------------------------------------------------
// Power pair test

/// A point of G-dot x Gamma+-dot; an empty coordinate is the point at infinity.
struct PairPoint {
    std::optional<double> t;
    std::optional<double> gamma;

    bool finite() const noexcept { return t.has_value() && gamma.has_value(); }
};

inline std::string coordinate_name(const std::optional<double>& c)
{
    return c ? text::format_double(*c) : std::string("inf");
}

struct PairWidths {
    double group_bump = 1.0;
    double dual_bump = 1.0;
    double group_tail = 0.5;
    double dual_tail = 0.01;
};

enum class Classification { in_character_space, excluded, inconclusive };

inline std::string classification_name(Classification c)
{
    switch (c) {
    case Classification::in_character_space: return "in-character-space";
    case Classification::excluded: return "excluded";
    case Classification::inconclusive: return "inconclusive";
    }
    return "?";
}

/// Finite-n decision rule for the norm trajectory nu_1..nu_m.
struct ClassificationRule {
    double attain_threshold = 0.98;
    double monotone_slack = 1e-6;
    double exclude_threshold = 0.95;
    double drift_limit = 0.005;
};

struct PairTestOptions {
    PairWidths widths;
    ClassificationRule rule;
    /// Level periods are rounded to multiples of this (0 disables rounding).
    double period_quantum = 4.0 * std::numbers::pi;
    std::optional<NormMethod> method;
    PowerIterationOptions power;
};

struct CharacterVerdict {
    PairPoint point;
    std::vector<int> truncation_levels;
    std::vector<GroupModel> level_models;
    std::vector<NormEstimate> norms;
    Classification classification = Classification::inconclusive;
    /// Distance of the final norm past the threshold of its class; negative
    /// (distance to the nearer threshold) when inconclusive.
    double margin = 0.0;
};

/// Base model for the pair test: period 16 pi at N = 256.
inline GroupModel default_pair_model()
{
    return GroupModel::line_with_period(256, 16.0 * std::numbers::pi);
}

/// The line model at level n: period L_0 sqrt(n / n_0) rounded to the quantum.
/// Window and bandwidth both grow, so both points at infinity are approached.
inline GroupModel pair_level_model(const GroupModel& base, int level, int first_level, double quantum)
{
    double period = base.period() * std::sqrt(static_cast<double>(level) / first_level);
    if (quantum > 0.0) {
        period = quantum * std::max(1.0, std::round(period / quantum));
    }
    return GroupModel::line_with_period(level, period);
}

/// The peaking symbols of the point on a model: a bump with value 1 at the
/// nearest grid point, or a tail tending to 1 at infinity.
inline std::pair<SymbolSpec, SymbolSpec> pair_symbols(const GroupModel& model, const PairPoint& point,
                                                      const PairWidths& widths)
{
    std::optional<SymbolSpec> phi;
    if (point.t) {
        const int j = model.nearest_group_index(*point.t);
        if (j < 0) {
            throw PreconditionError("t = " + text::format_double(*point.t) + " lies outside the window of "
                                    + model.to_string());
        }
        const double z = model.spacing() / widths.group_bump;
        if (std::exp(-z * z) >= 1.0 - 1e-6) {
            throw PreconditionError("group bump too wide to peak at a single grid point");
        }
        phi = SymbolSpec::gauss(model.group_point(j), widths.group_bump);
    } else {
        phi = SymbolSpec::tail(widths.group_tail);
    }
    std::optional<SymbolSpec> theta;
    if (point.gamma) {
        if (*point.gamma < 0.0) {
            throw PreconditionError("gamma must lie in the positive cone");
        }
        const long long m = std::llround(*point.gamma / model.dual_spacing());
        if (m > model.max_frequency()) {
            throw PreconditionError("gamma lies beyond the dual grid of " + model.to_string());
        }
        const double z = model.dual_spacing() / widths.dual_bump;
        if (std::exp(-z * z) >= 1.0 - 1e-6) {
            throw PreconditionError("dual bump too wide to peak at a single grid point");
        }
        theta = SymbolSpec::dual_gauss(m * model.dual_spacing(), widths.dual_bump);
    } else {
        theta = SymbolSpec::dual_tail(widths.dual_tail);
    }
    return {*phi, *theta};
}

inline std::pair<Classification, double> classify(std::span<const NormEstimate> norms, const ClassificationRule& rule)
{
    const std::size_t m = norms.size();
    const double last = norms[m - 1].value;
    bool converged = true;
    bool monotone = true;
    for (std::size_t i = 0; i < m; ++i) {
        converged = converged && norms[i].converged;
        if (i > 0 && norms[i].value < norms[i - 1].value - rule.monotone_slack) {
            monotone = false;
        }
    }
    const double drift = m >= 2 ? std::abs(last - norms[m - 2].value) : std::numeric_limits<double>::infinity();
    if (converged && last >= rule.attain_threshold && monotone) {
        return {Classification::in_character_space, last - rule.attain_threshold};
    }
    if (converged && last <= rule.exclude_threshold && drift < rule.drift_limit) {
        return {Classification::excluded, rule.exclude_threshold - last};
    }
    return {Classification::inconclusive,
            -std::min(std::abs(last - rule.attain_threshold), std::abs(last - rule.exclude_threshold))};
}

/// ||T_phi D_theta|| over the schedule for the peaking symbols of a point,
/// classified by the decision rule.
inline CharacterVerdict power_pair_test(const GroupModel& base, const PairPoint& point, std::span<const int> schedule,
                                        const PairTestOptions& options = {})
{
    if (!base.is_line()) {
        throw UnsupportedModel("the pair test runs on the line model");
    }
    validate_schedule(schedule, 3);
    CharacterVerdict verdict;
    verdict.point = point;
    for (const int level : schedule) {
        const auto model = pair_level_model(base, level, schedule.front(), options.period_quantum);
        const auto [phi, theta] = pair_symbols(model, point, options.widths);
        const auto t = toeplitz_operator(model, phi);
        const auto d = fourier_multiplier(model, theta);
        const auto product = compose(t, d);
        const auto method = options.method.value_or(default_method_for_level(level));
        verdict.truncation_levels.push_back(level);
        verdict.level_models.push_back(model);
        verdict.norms.push_back(operator_norm(product, method, options.power));
    }
    std::tie(verdict.classification, verdict.margin) = classify(verdict.norms, options.rule);
    return verdict;
}

/// Expected verdict: excluded exactly when both coordinates are finite.
inline Classification expected_classification(const PairPoint& point)
{
    return point.finite() ? Classification::excluded : Classification::in_character_space;
}

// ---------------------------------------------------------------------------
// Sweeps over truncation levels

struct SweepRow {
    int level = 0;
    Eigen::Index dimension = 0;
    NormEstimate norm;
    double grid_sup = 0.0;
};

/// ||T_phi|| at each level, with the grid sup of |phi| it should approach.
inline std::vector<SweepRow> symbol_norm_sweep(const GroupModel& base, const SymbolSpec& phi,
                                               std::span<const int> schedule,
                                               std::optional<NormMethod> method = std::nullopt,
                                               const PowerIterationOptions& power = {})
{
    detail::require_group_symbol(phi);
    validate_schedule(schedule);
    std::vector<SweepRow> rows;
    for (const int level : schedule) {
        const auto model = refine_model(base, level);
        const auto t = toeplitz_operator(model, phi);
        SweepRow row;
        row.level = level;
        row.dimension = t.dimension();
        row.norm = operator_norm(t, method.value_or(default_method_for_level(level)), power);
        row.grid_sup = evaluate_on_group(phi, model).values().cwiseAbs().maxCoeff();
        rows.push_back(row);
    }
    return rows;
}

struct DecayRow {
    int level = 0;
    Eigen::Index dimension = 0;
    /// 1-based index ceil(n/4) of the tracked singular value.
    Eigen::Index index = 0;
    double sigma_first = 0.0;
    double sigma_index = 0.0;
    double ratio = 0.0;
    /// Count of singular values above 1e-14 sigma_1.
    Eigen::Index numerical_rank = 0;
};

inline std::vector<DecayRow> commutator_decay(const GroupModel& base, const SymbolSpec& phi, const SymbolSpec& psi,
                                              CommutatorKind kind, std::span<const int> schedule)
{
    validate_schedule(schedule);
    std::vector<DecayRow> rows;
    for (const int level : schedule) {
        const auto model = refine_model(base, level);
        const auto c = kind == CommutatorKind::commutator ? commutator(model, phi, psi)
                                                          : semi_commutator(model, phi, psi);
        const auto s = singular_values(c);
        DecayRow row;
        row.level = level;
        row.dimension = c.dimension();
        row.index = std::min<Eigen::Index>((level + 3) / 4, row.dimension);
        row.sigma_first = s.front();
        row.sigma_index = s[row.index - 1];
        row.ratio = row.sigma_first > 0.0 ? row.sigma_index / row.sigma_first : 0.0;
        row.numerical_rank = std::count_if(s.begin(), s.end(), [&](double x) { return x > 1e-14 * s.front(); });
        rows.push_back(row);
    }
    return rows;
}

/// True when the tracked ratio shrinks by at least `factor` at every step. A
/// ratio already at zero (singular values below round-off, which the SVD
/// reports as exact zeros) cannot shrink, so it does not count as decay.
inline bool decay_shrinks(std::span<const DecayRow> rows, double factor = 1.5)
{
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[i - 1].ratio > 0.0 && rows[i - 1].ratio >= factor * rows[i].ratio)) {
            return false;
        }
    }
    return !rows.empty();
}

} // namespace toeplab
