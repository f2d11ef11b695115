#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "toeplab/analysis.hpp"

namespace toeplab::experiments {

// ---------------------------------------------------------------------------
// Result tables

/// Rows of one experiment plus the verdict. Every row is self-describing: the
/// config echo holds everything needed to re-run it.
struct ResultTable {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<double> wall_ms;
    bool pass = true;
    std::map<std::string, int> counts;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::vector<std::string> failures;

    void add_row(std::vector<std::string> row, double ms)
    {
        rows.push_back(std::move(row));
        wall_ms.push_back(ms);
    }

    void note_margin(double m) { worst_margin = std::min(worst_margin, m); }

    void fail(std::string what)
    {
        pass = false;
        failures.push_back(std::move(what));
    }
};

inline std::string config_line(const ResultTable& t)
{
    std::string s = "command=" + t.experiment;
    for (const auto& [k, v] : t.config) {
        s += ' ' + k + '=' + v;
    }
    return s;
}

inline void write_csv(std::ostream& out, const ResultTable& t)
{
    out << "# config: " << config_line(t) << '\n';
    for (const auto& c : t.columns) {
        out << c << ',';
    }
    out << "wall_ms\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        for (const auto& cell : t.rows[i]) {
            out << cell << ',';
        }
        out << text::format_g17(t.wall_ms[i]) << '\n';
    }
}

inline std::string summary_json(const ResultTable& t)
{
    nlohmann::ordered_json j;
    j["experiment"] = t.experiment;
    nlohmann::ordered_json config;
    for (const auto& [k, v] : t.config) {
        config[k] = v;
    }
    j["config"] = config;
    j["pass"] = t.pass;
    j["counts"] = t.counts;
    j["worst_margin"] = std::isfinite(t.worst_margin) ? nlohmann::json(t.worst_margin) : nlohmann::json(nullptr);
    if (!t.failures.empty()) {
        j["failures"] = t.failures;
    }
    return j.dump();
}

inline std::string g17(double x) { return text::format_g17(x); }
inline std::string yes_no(bool b) { return b ? "pass" : "fail"; }

// ---------------------------------------------------------------------------
// Shared parsing

inline std::vector<int> parse_schedule(std::string_view s)
{
    std::vector<int> out;
    for (const auto field : text::split(s, ',')) {
        const auto f = text::trim(field);
        if (f.empty()) {
            throw ParseError("empty entry in schedule '" + std::string(s) + "'");
        }
        const auto v = text::parse_integer(f);
        if (v <= 0 || v > std::numeric_limits<int>::max()) {
            throw ParseError("schedule entry out of range: " + std::string(f));
        }
        out.push_back(static_cast<int>(v));
    }
    validate_schedule(out);
    return out;
}

inline std::string format_schedule(const std::vector<int>& s)
{
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += (i ? "," : "") + std::to_string(s[i]);
    }
    return out;
}

inline std::vector<double> parse_list(std::string_view s)
{
    std::vector<double> out;
    if (text::trim(s).empty()) {
        return out;
    }
    for (const auto field : text::split(s, ',')) {
        out.push_back(text::parse_double(text::trim(field)));
    }
    return out;
}

inline std::string format_list(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? "," : "") + text::format_double(v[i]);
    }
    return out;
}

/// "svd", "power", or "auto" (svd up to the dense limit, power above).
inline std::optional<NormMethod> parse_method_option(std::string_view s)
{
    if (s == "auto") {
        return std::nullopt;
    }
    return parse_method(s);
}

inline std::string method_option_name(const std::optional<NormMethod>& m)
{
    return m ? method_name(*m) : "auto";
}

// ---------------------------------------------------------------------------
// Execution helpers

/// Runs fn(i) for i in [0, n) on up to `threads` workers and returns the
/// results in index order; the first exception in index order is rethrown.
template <typename F>
auto ordered_map(std::size_t n, int threads, F fn) -> std::vector<decltype(fn(std::size_t{}))>
{
    using R = decltype(fn(std::size_t{}));
    std::vector<std::optional<R>> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                results[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto count = static_cast<std::size_t>(std::clamp<long long>(threads, 1, static_cast<long long>(std::max<std::size_t>(n, 1))));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < count; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    std::vector<R> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) {
            std::rethrow_exception(errors[i]);
        }
        out.push_back(std::move(*results[i]));
    }
    return out;
}

template <typename F>
auto timed(F fn)
{
    const auto start = std::chrono::steady_clock::now();
    auto value = fn();
    const std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - start;
    return std::pair{std::move(value), ms.count()};
}

inline double relative_error(double measured, double reference)
{
    return std::abs(measured - reference) / std::max(std::abs(reference), std::numeric_limits<double>::min());
}

// ---------------------------------------------------------------------------
// plancherel

struct PlancherelOptions {
    std::string model = "circle:M=64,N=129";
    int trials = 100;
    std::uint64_t seed = 1;
    double isometry_tolerance = 1e-10;
    double roundtrip_tolerance = 1e-12;
};

/// Random vectors drawn with the seed: sample-domain vectors when every
/// sample frequency is represented, band-limited ones (random dual data)
/// on an oversampled circle.
inline GridFunction random_grid_function(const GroupModel& model, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    if (model.is_circle() && model.samples() > model.dual_size()) {
        CVector g(model.dual_size());
        for (auto& x : g) {
            x = {normal(rng), normal(rng)};
        }
        return inverse_fourier(DualGridFunction(model, g));
    }
    CVector f(model.samples());
    for (auto& x : f) {
        x = {normal(rng), normal(rng)};
    }
    return {model, f};
}

inline ResultTable run_plancherel(const PlancherelOptions& o)
{
    const auto model = GroupModel::parse(o.model);
    if (o.trials <= 0) {
        throw PreconditionError("trials must be positive");
    }
    ResultTable t;
    t.experiment = "plancherel";
    t.config = {{"model", model.to_string()}, {"trials", std::to_string(o.trials)}, {"seed", std::to_string(o.seed)}};
    t.columns = {"trial", "norm", "isometry_rel_err", "roundtrip_rel_err", "status"};
    std::mt19937_64 rng(o.seed);
    int passed = 0;
    for (int i = 0; i < o.trials; ++i) {
        const auto f = random_grid_function(model, rng);
        const auto [errors, ms] = timed([&] {
            const auto g = forward_fourier(f);
            const auto back = inverse_fourier(g);
            const double n = f.l2_norm();
            return std::pair{relative_error(g.l2_norm(), n), (back.values() - f.values()).norm() / f.values().norm()};
        });
        const bool ok = errors.first < o.isometry_tolerance && errors.second < o.roundtrip_tolerance;
        passed += ok ? 1 : 0;
        t.note_margin(std::min(o.isometry_tolerance - errors.first, o.roundtrip_tolerance - errors.second));
        if (!ok) {
            t.fail("trial " + std::to_string(i));
        }
        t.add_row({std::to_string(i), g17(f.l2_norm()), g17(errors.first), g17(errors.second), yes_no(ok)}, ms);
    }
    t.counts = {{"pass", passed}, {"fail", o.trials - passed}};
    return t;
}

// ---------------------------------------------------------------------------
// character-grid

struct CharacterGridOptions {
    std::string model = default_pair_model().to_string();
    std::string schedule = "256,512,1024";
    std::vector<double> t_values{0.0, 2.0};
    std::vector<double> gamma_values{0.5, 1.0};
    bool infinity = true;
    std::optional<NormMethod> method;
    int threads = 1;
};

inline std::vector<PairPoint> character_grid_points(const CharacterGridOptions& o)
{
    std::vector<std::optional<double>> ts(o.t_values.begin(), o.t_values.end());
    std::vector<std::optional<double>> gs(o.gamma_values.begin(), o.gamma_values.end());
    if (o.infinity) {
        ts.emplace_back();
        gs.emplace_back();
    }
    std::vector<PairPoint> points;
    for (const auto& t : ts) {
        for (const auto& g : gs) {
            points.push_back({t, g});
        }
    }
    return points;
}

inline ResultTable run_character_grid(const CharacterGridOptions& o)
{
    const auto model = GroupModel::parse(o.model);
    const auto schedule = parse_schedule(o.schedule);
    validate_schedule(schedule, 3);
    ResultTable t;
    t.experiment = "character-grid";
    t.config = {{"model", model.to_string()},
                {"schedule", format_schedule(schedule)},
                {"t", format_list(o.t_values)},
                {"gamma", format_list(o.gamma_values)},
                {"infinity", o.infinity ? "true" : "false"},
                {"method", method_option_name(o.method)}};
    t.columns = {"t", "gamma"};
    for (const int n : schedule) {
        t.columns.push_back("norm_" + std::to_string(n));
    }
    t.columns.insert(t.columns.end(), {"final_drift", "converged", "classification", "expected", "margin"});

    PairTestOptions options;
    options.method = o.method;
    const auto points = character_grid_points(o);
    const auto results = ordered_map(points.size(), o.threads, [&](std::size_t i) {
        return timed([&] { return power_pair_test(model, points[i], schedule, options); });
    });
    t.counts = {{"in-character-space", 0}, {"excluded", 0}, {"inconclusive", 0}};
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& [v, ms] = results[i];
        const auto expected = expected_classification(points[i]);
        std::vector<std::string> row{coordinate_name(points[i].t), coordinate_name(points[i].gamma)};
        bool converged = true;
        for (const auto& n : v.norms) {
            row.push_back(g17(n.value));
            converged = converged && n.converged;
        }
        const auto m = v.norms.size();
        row.push_back(g17(std::abs(v.norms[m - 1].value - v.norms[m - 2].value)));
        row.push_back(converged ? "true" : "false");
        row.push_back(classification_name(v.classification));
        row.push_back(classification_name(expected));
        row.push_back(g17(v.margin));
        t.add_row(std::move(row), ms);
        ++t.counts[classification_name(v.classification)];
        t.note_margin(v.classification == expected ? v.margin : -std::abs(v.margin));
        if (v.classification != expected) {
            t.fail("(" + coordinate_name(points[i].t) + ", " + coordinate_name(points[i].gamma) + ") classified "
                   + classification_name(v.classification) + ", expected " + classification_name(expected));
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// hs-bound

struct HSBoundOptions {
    std::string model = "line:N=512,h=0.1";
    std::string phi = "gauss:center=0,width=1";
    std::string theta = "dual-gauss:center=3,width=1";
    /// When positive, this many random compactly supported pairs replace phi/theta.
    int random_pairs = 0;
    std::uint64_t seed = 1;
    double tolerance = 1e-8;
};

/// Random Gaussian-bump pairs inside a window of the given model.
inline std::vector<std::pair<SymbolSpec, SymbolSpec>> random_bump_pairs(const GroupModel& model, int count,
                                                                         std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const double half = 0.25 * model.period();
    const double top = model.max_frequency() * model.dual_spacing();
    std::uniform_real_distribution<double> center(-0.3 * half, 0.3 * half);
    std::uniform_real_distribution<double> width(0.5, 2.0);
    std::uniform_real_distribution<double> height(0.25, 2.0);
    std::uniform_real_distribution<double> frequency(0.0, 0.3 * top);
    std::uniform_real_distribution<double> dual_width(0.5, 2.0);
    std::vector<std::pair<SymbolSpec, SymbolSpec>> out;
    for (int i = 0; i < count; ++i) {
        const double c = center(rng);
        const double w = width(rng);
        const double a = height(rng);
        const double f = frequency(rng);
        const double dw = dual_width(rng);
        const double da = height(rng);
        out.emplace_back(SymbolSpec::gauss(c, w, a), SymbolSpec::dual_gauss(f, dw, da));
    }
    return out;
}

struct HSCheck {
    HSKernel kernel;
    double operator_gap = 0.0;
    double singular_sum_rel_err = 0.0;
};

inline HSCheck check_hs_kernel(const GroupModel& model, const SymbolSpec& phi, const SymbolSpec& theta)
{
    HSCheck c{hs_kernel(model, phi, theta)};
    const auto reference = compose(fourier_multiplier_l2(model, theta), multiplication_operator(model, phi));
    const auto kop = kernel_operator(c.kernel);
    c.operator_gap = operator_norm(add(kop, reference, 1.0, -1.0)).value;
    double sum = 0.0;
    for (const double s : singular_values(kop)) {
        sum += s * s;
    }
    const double hs2 = c.kernel.hs_norm * c.kernel.hs_norm;
    c.singular_sum_rel_err = hs2 > 0.0 ? std::abs(sum - hs2) / hs2 : sum;
    return c;
}

inline ResultTable run_hs_bound(const HSBoundOptions& o)
{
    const auto model = GroupModel::parse(o.model);
    std::vector<std::pair<SymbolSpec, SymbolSpec>> pairs;
    ResultTable t;
    t.experiment = "hs-bound";
    t.config = {{"model", model.to_string()}};
    if (o.random_pairs > 0) {
        pairs = random_bump_pairs(model, o.random_pairs, o.seed);
        t.config.emplace_back("pairs", std::to_string(o.random_pairs));
        t.config.emplace_back("seed", std::to_string(o.seed));
    } else {
        pairs.emplace_back(SymbolSpec::parse(o.phi), SymbolSpec::parse(o.theta));
        t.config.emplace_back("phi", pairs.front().first.to_string());
        t.config.emplace_back("theta", pairs.front().second.to_string());
    }
    t.columns = {"phi", "theta", "hs_norm", "bound", "support_measure", "operator_gap", "singular_sum_rel_err",
                 "status"};
    int passed = 0;
    for (const auto& [phi, theta] : pairs) {
        const auto [c, ms] = timed([&] { return check_hs_kernel(model, phi, theta); });
        const bool bounded = c.kernel.hs_norm <= c.kernel.bound * (1.0 + 1e-8);
        const bool ok = bounded && c.operator_gap < o.tolerance && c.singular_sum_rel_err < o.tolerance;
        passed += ok ? 1 : 0;
        t.note_margin(std::min({c.kernel.bound - c.kernel.hs_norm, o.tolerance - c.operator_gap,
                                o.tolerance - c.singular_sum_rel_err}));
        if (!ok) {
            t.fail(phi.to_string() + " / " + theta.to_string());
        }
        // Symbol specs contain commas; quote them for CSV.
        t.add_row({'"' + phi.to_string() + '"', '"' + theta.to_string() + '"', g17(c.kernel.hs_norm),
                   g17(c.kernel.bound), g17(c.kernel.support_measure), g17(c.operator_gap),
                   g17(c.singular_sum_rel_err), yes_no(ok)},
                  ms);
    }
    t.counts = {{"pass", passed}, {"fail", static_cast<int>(pairs.size()) - passed}};
    return t;
}

// ---------------------------------------------------------------------------
// norm-sweep

struct NormSweepOptions {
    std::string model = "circle:M=64,N=129";
    std::string phi = "trig:a-1=1,a1=1";
    std::string schedule = "64,128,256,512,1024";
    std::optional<NormMethod> method;
    /// Largest accepted gap between the final norm and the grid sup of |phi|.
    double tolerance = 0.01;
    double monotone_slack = 1e-6;
};

inline ResultTable run_norm_sweep(const NormSweepOptions& o)
{
    const auto model = GroupModel::parse(o.model);
    const auto phi = SymbolSpec::parse(o.phi);
    const auto schedule = parse_schedule(o.schedule);
    for (const int n : schedule) {
        check_representable(phi, refine_model(model, n));
    }
    ResultTable t;
    t.experiment = "norm-sweep";
    t.config = {{"model", model.to_string()},
                {"phi", phi.to_string()},
                {"schedule", format_schedule(schedule)},
                {"method", method_option_name(o.method)},
                {"tolerance", text::format_double(o.tolerance)}};
    t.columns = {"level", "dimension", "method", "norm", "iterations", "residual", "converged", "grid_sup", "gap"};
    double previous = -std::numeric_limits<double>::infinity();
    for (const int n : schedule) {
        const std::vector<int> one{n};
        const auto [rows, ms] = timed([&] { return symbol_norm_sweep(model, phi, one, o.method); });
        const auto& r = rows.front();
        const double gap = r.grid_sup - r.norm.value;
        t.add_row({std::to_string(n), std::to_string(r.dimension), method_name(r.norm.method), g17(r.norm.value),
                   std::to_string(r.norm.iterations), g17(r.norm.residual), r.norm.converged ? "true" : "false",
                   g17(r.grid_sup), g17(gap)},
                  ms);
        if (!r.norm.converged) {
            t.fail("level " + std::to_string(n) + " did not converge");
        }
        if (r.norm.value < previous - o.monotone_slack) {
            t.fail("norm decreases at level " + std::to_string(n));
        }
        if (gap < -1e-12 * std::max(1.0, r.grid_sup)) {
            t.fail("norm exceeds the grid sup at level " + std::to_string(n));
        }
        previous = r.norm.value;
        if (n == schedule.back()) {
            t.note_margin(o.tolerance - gap);
            if (gap > o.tolerance) {
                t.fail("final gap " + g17(gap) + " exceeds tolerance");
            }
        }
    }
    t.counts = {{"levels", static_cast<int>(schedule.size())}};
    return t;
}

// ---------------------------------------------------------------------------
// witness-demo

struct WitnessDemoOptions {
    std::string model = GroupModel::line_with_period(512, 16.0 * std::numbers::pi).to_string();
    double gamma0 = 1.0;
    /// Empty: 16 grid steps.
    std::optional<double> t0;
    double gamma = 2.0;
    std::vector<double> epsilons{0.1, 0.05};
    double slack = 0.01;
    int random_multipliers = 5;
    std::uint64_t seed = 1;
};

inline ResultTable run_witness_demo(const WitnessDemoOptions& o)
{
    const auto model = GroupModel::parse(o.model);
    if (!model.is_line()) {
        throw UnsupportedModel("witness-demo runs on the line model");
    }
    const double t0 = o.t0.value_or(16.0 * model.spacing());
    // Validate both grid points before any work.
    const auto s_gamma = modulation_witness(model, o.gamma0);
    const auto s_t = translation_witness(model, t0);

    ResultTable t;
    t.experiment = "witness-demo";
    t.config = {{"model", model.to_string()},        {"gamma0", text::format_double(o.gamma0)},
                {"t0", text::format_double(t0)},     {"gamma", text::format_double(o.gamma)},
                {"epsilon", format_list(o.epsilons)}, {"slack", text::format_double(o.slack)},
                {"multipliers", std::to_string(o.random_multipliers)}, {"seed", std::to_string(o.seed)}};
    t.columns = {"check", "parameter", "value", "threshold", "status"};
    int passed = 0;
    int total = 0;
    auto record = [&](const std::string& check, const std::string& parameter, double value, double threshold,
                      bool upper, double ms) {
        const bool ok = upper ? value < threshold : value >= threshold;
        ++total;
        passed += ok ? 1 : 0;
        t.note_margin(upper ? threshold - value : value - threshold);
        if (!ok) {
            t.fail(check + " " + parameter);
        }
        t.add_row({check, parameter, g17(value), g17(threshold), yes_no(ok)}, ms);
    };

    {
        const auto [gap, ms] = timed([&] {
            const auto character = multiplication_from_samples(character_samples(
                model, std::llround(o.gamma0 / model.dual_spacing())));
            return operator_norm(add(s_gamma, compress_to_hardy(to_basis(character, Basis::l2_fourier)), 1.0, -1.0))
                .value;
        });
        record("modulation-identity", "gamma0=" + text::format_double(o.gamma0), gap, 1e-10, true, ms);
    }
    {
        const auto [defect, ms] = timed([&] {
            const long long shift = std::llround(o.gamma0 / model.dual_spacing());
            double worst = 0.0;
            for (Eigen::Index i = 0; i + shift < s_gamma.dimension(); ++i) {
                worst = std::max(worst, std::abs(s_gamma.matrix().col(i).norm() - 1.0));
            }
            return worst;
        });
        record("modulation-isometry", "gamma0=" + text::format_double(o.gamma0), defect, 1e-12, true, ms);
    }
    {
        const auto [gap, ms] = timed([&] {
            return operator_norm(add(s_t, to_basis(translation_multiplier(model, t0), Basis::l2_sample), 1.0, -1.0))
                .value;
        });
        record("translation-identity", "t0=" + text::format_double(t0), gap, 1e-10, true, ms);
    }
    {
        const auto [defect, ms] = timed([&] {
            const CMatrix g = s_t.matrix().adjoint() * s_t.matrix();
            return (g - CMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
        });
        record("translation-unitary", "t0=" + text::format_double(t0), defect, 1e-12, true, ms);
    }
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> center(0.0, 0.3 * model.max_frequency() * model.dual_spacing());
    std::uniform_real_distribution<double> width(0.5, 2.0);
    for (int i = 0; i < o.random_multipliers; ++i) {
        const double c = center(rng);
        const double w = width(rng);
        const auto theta = (i % 2 == 0) ? SymbolSpec::dual_gauss(c, w) : SymbolSpec::dual_tail(w);
        const auto [gap, ms] = timed([&] {
            const auto d = fourier_multiplier_l2(model, theta);
            return operator_norm(add(compose(d, s_t), compose(s_t, d), 1.0, -1.0)).value;
        });
        record("translation-commutes", '"' + theta.to_string() + '"', gap, 1e-10, true, ms);
    }
    for (const double eps : o.epsilons) {
        const auto [r, ms] = timed([&] {
            return reproduce_translation_witness(model, o.gamma, eps, PairWidths{}.dual_bump, PairWidths{}.group_tail,
                                                 o.slack);
        });
        record("translation-lower-bound", "epsilon=" + text::format_double(eps) + ";t0=" + text::format_double(r.t0),
               r.achieved, r.lower_bound - o.slack, false, ms);
    }
    t.counts = {{"pass", passed}, {"fail", total - passed}};
    return t;
}

// ---------------------------------------------------------------------------
// commutator-decay

struct CommutatorDecayOptions {
    std::string model = default_pair_model().to_string();
    std::string phi = "gauss:center=0,width=1";
    std::string psi = "gauss:center=1,width=1";
    std::string schedule = "256,512,1024";
    /// "both", "commutator" or "semi-commutator".
    std::string kind = "both";
    double factor = 1.5;
};

inline ResultTable run_commutator_decay(const CommutatorDecayOptions& o)
{
    const auto model = GroupModel::parse(o.model);
    const auto phi = SymbolSpec::parse(o.phi);
    const auto psi = SymbolSpec::parse(o.psi);
    const auto schedule = parse_schedule(o.schedule);
    std::vector<CommutatorKind> kinds;
    if (o.kind == "both" || o.kind == "commutator") {
        kinds.push_back(CommutatorKind::commutator);
    }
    if (o.kind == "both" || o.kind == "semi-commutator") {
        kinds.push_back(CommutatorKind::semi_commutator);
    }
    if (kinds.empty()) {
        throw ParseError("unknown commutator kind '" + o.kind + "'");
    }
    for (const int n : schedule) {
        check_representable(phi, refine_model(model, n));
        check_representable(psi, refine_model(model, n));
    }
    ResultTable t;
    t.experiment = "commutator-decay";
    t.config = {{"model", model.to_string()},
                {"phi", phi.to_string()},
                {"psi", psi.to_string()},
                {"schedule", format_schedule(schedule)},
                {"kind", o.kind},
                {"factor", text::format_double(o.factor)}};
    t.columns = {"kind", "level", "dimension", "index", "sigma_1", "sigma_index", "ratio", "shrink", "numerical_rank"};
    for (const auto kind : kinds) {
        std::vector<DecayRow> rows;
        for (const int n : schedule) {
            const std::vector<int> one{n};
            auto [r, ms] = timed([&] { return commutator_decay(model, phi, psi, kind, one); });
            const auto& row = r.front();
            std::string shrink = "";
            if (!rows.empty()) {
                // 0/0 (both ratios at the round-off floor) prints as nan.
                const double s = rows.back().ratio / row.ratio;
                shrink = std::isnan(s) ? "nan" : g17(s);
                t.note_margin(std::isnan(s) ? -o.factor : s - o.factor);
            }
            t.add_row({kind_name(kind), std::to_string(n), std::to_string(row.dimension), std::to_string(row.index),
                       g17(row.sigma_first), g17(row.sigma_index), g17(row.ratio), shrink,
                       std::to_string(row.numerical_rank)},
                      ms);
            rows.push_back(row);
        }
        const bool ok = decay_shrinks(rows, o.factor);
        t.counts[kind_name(kind) + (ok ? "-pass" : "-fail")] = 1;
        if (!ok) {
            t.fail(kind_name(kind) + " ratio does not shrink by " + text::format_double(o.factor) + " per level");
        }
    }
    return t;
}

} // namespace toeplab::experiments
