// Command-line front end for the experiment suites.
//
//   toeplab <command> [--flag value ...] [--config file]
//
// A config file holds key=value lines naming long flags; its entries are
// applied before the command-line flags, so explicit flags win.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toeplab/experiments.hpp"

namespace {

using namespace toeplab;
using namespace toeplab::experiments;

enum ExitCode { exit_pass = 0, exit_usage = 2, exit_fail = 3, exit_aliasing = 4 };

struct Output {
    std::string out;
    std::string json;
};

std::vector<std::string> read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config file '" + path + "'");
    }
    std::vector<std::string> args;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto s = text::trim(line);
        if (s.empty() || s.front() == '#') {
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw ParseError(path + ":" + std::to_string(number) + ": expected key=value");
        }
        args.push_back("--" + std::string(text::trim(s.substr(0, eq))) + "=" + std::string(text::trim(s.substr(eq + 1))));
    }
    return args;
}

/// Splices config-file entries in after the subcommand name and drops the
/// --config flag itself.
std::vector<std::string> expand_config(int argc, char** argv)
{
    std::vector<std::string> rest;
    std::vector<std::string> injected;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config") {
            if (i + 1 >= argc) {
                throw ParseError("--config needs a file");
            }
            const auto more = read_config_file(argv[++i]);
            injected.insert(injected.end(), more.begin(), more.end());
        } else if (a.rfind("--config=", 0) == 0) {
            const auto more = read_config_file(a.substr(9));
            injected.insert(injected.end(), more.begin(), more.end());
        } else {
            rest.push_back(a);
        }
    }
    std::vector<std::string> args{argv[0]};
    if (!rest.empty() && rest.front().rfind("-", 0) != 0) {
        args.push_back(rest.front());
        rest.erase(rest.begin());
    }
    args.insert(args.end(), injected.begin(), injected.end());
    args.insert(args.end(), rest.begin(), rest.end());
    return args;
}

int emit(const ResultTable& t, const Output& o)
{
    if (o.out.empty() || o.out == "-") {
        write_csv(std::cout, t);
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) {
            throw ParseError("cannot write '" + o.out + "'");
        }
        write_csv(f, t);
    }
    const auto summary = summary_json(t);
    if (!o.json.empty()) {
        std::ofstream f(o.json, std::ios::binary);
        if (!f) {
            throw ParseError("cannot write '" + o.json + "'");
        }
        f << summary << '\n';
    } else {
        std::cerr << summary << '\n';
    }
    for (const auto& f : t.failures) {
        std::cerr << "failed: " << f << '\n';
    }
    return t.pass ? exit_pass : exit_fail;
}

void add_output(CLI::App* c, Output& o)
{
    c->add_option("--out", o.out, "CSV output path (default stdout)");
    c->add_option("--json", o.json, "JSON summary path (default stderr)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite-section experiments for Toeplitz operators and Fourier multipliers"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    Output output;

    PlancherelOptions plancherel;
    auto* c_plancherel = app.add_subcommand("plancherel", "Fourier isometry and round trip on random vectors");
    c_plancherel->add_option("--model", plancherel.model, "group model")->capture_default_str();
    c_plancherel->add_option("--trials", plancherel.trials)->capture_default_str();
    c_plancherel->add_option("--seed", plancherel.seed)->capture_default_str();
    add_output(c_plancherel, output);

    CharacterGridOptions grid;
    std::string grid_t = format_list(grid.t_values);
    std::string grid_gamma = format_list(grid.gamma_values);
    std::string grid_method = "auto";
    auto* c_grid = app.add_subcommand("character-grid", "Norm dichotomy over a grid of (t, gamma) points");
    c_grid->add_option("--model", grid.model, "base line model")->capture_default_str();
    c_grid->add_option("--schedule", grid.schedule)->capture_default_str();
    c_grid->add_option("--t", grid_t, "finite group coordinates")->capture_default_str();
    c_grid->add_option("--gamma", grid_gamma, "finite dual coordinates")->capture_default_str();
    c_grid->add_option("--infinity", grid.infinity, "include the points at infinity")->capture_default_str();
    c_grid->add_option("--method", grid_method, "svd, power or auto")->capture_default_str();
    c_grid->add_option("--threads", grid.threads)->capture_default_str();
    add_output(c_grid, output);

    HSBoundOptions hs;
    auto* c_hs = app.add_subcommand("hs-bound", "Hilbert-Schmidt kernel of D_theta M_phi and its bound");
    c_hs->add_option("--model", hs.model)->capture_default_str();
    c_hs->add_option("--phi", hs.phi)->capture_default_str();
    c_hs->add_option("--theta", hs.theta)->capture_default_str();
    c_hs->add_option("--pairs", hs.random_pairs, "random pairs instead of phi/theta")->capture_default_str();
    c_hs->add_option("--seed", hs.seed)->capture_default_str();
    add_output(c_hs, output);

    NormSweepOptions sweep;
    std::string sweep_method = "auto";
    auto* c_sweep = app.add_subcommand("norm-sweep", "||T_phi|| against the sup of |phi| over a schedule");
    c_sweep->add_option("--model", sweep.model)->capture_default_str();
    c_sweep->add_option("--phi", sweep.phi)->capture_default_str();
    c_sweep->add_option("--schedule", sweep.schedule)->capture_default_str();
    c_sweep->add_option("--method", sweep_method, "svd, power or auto")->capture_default_str();
    c_sweep->add_option("--tolerance", sweep.tolerance)->capture_default_str();
    add_output(c_sweep, output);

    WitnessDemoOptions witness;
    double witness_t0 = 0.0;
    std::string witness_eps = format_list(witness.epsilons);
    auto* c_witness = app.add_subcommand("witness-demo", "Modulation and translation witness identities");
    c_witness->add_option("--model", witness.model)->capture_default_str();
    c_witness->add_option("--gamma0", witness.gamma0)->capture_default_str();
    auto* t0_option = c_witness->add_option("--t0", witness_t0, "translation (default 16 grid steps)");
    c_witness->add_option("--gamma", witness.gamma)->capture_default_str();
    c_witness->add_option("--epsilon", witness_eps)->capture_default_str();
    c_witness->add_option("--slack", witness.slack)->capture_default_str();
    c_witness->add_option("--multipliers", witness.random_multipliers)->capture_default_str();
    c_witness->add_option("--seed", witness.seed)->capture_default_str();
    add_output(c_witness, output);

    CommutatorDecayOptions decay;
    auto* c_decay = app.add_subcommand("commutator-decay", "Singular-value decay of (semi-)commutators");
    c_decay->add_option("--model", decay.model)->capture_default_str();
    c_decay->add_option("--phi", decay.phi)->capture_default_str();
    c_decay->add_option("--psi", decay.psi)->capture_default_str();
    c_decay->add_option("--schedule", decay.schedule)->capture_default_str();
    c_decay->add_option("--kind", decay.kind, "both, commutator or semi-commutator")->capture_default_str();
    c_decay->add_option("--factor", decay.factor)->capture_default_str();
    add_output(c_decay, output);

    try {
        auto args = expand_config(argc, argv);
        std::vector<char*> cargs;
        for (auto& a : args) {
            cargs.push_back(a.data());
        }
        try {
            app.parse(static_cast<int>(cargs.size()), cargs.data());
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return exit_usage;
        }

        if (c_plancherel->parsed()) {
            return emit(run_plancherel(plancherel), output);
        }
        if (c_grid->parsed()) {
            grid.t_values = parse_list(grid_t);
            grid.gamma_values = parse_list(grid_gamma);
            grid.method = parse_method_option(grid_method);
            return emit(run_character_grid(grid), output);
        }
        if (c_hs->parsed()) {
            return emit(run_hs_bound(hs), output);
        }
        if (c_sweep->parsed()) {
            sweep.method = parse_method_option(sweep_method);
            return emit(run_norm_sweep(sweep), output);
        }
        if (c_witness->parsed()) {
            if (t0_option->count() > 0) {
                witness.t0 = witness_t0;
            }
            witness.epsilons = parse_list(witness_eps);
            return emit(run_witness_demo(witness), output);
        }
        if (c_decay->parsed()) {
            return emit(run_commutator_decay(decay), output);
        }
    } catch (const AliasingError& e) {
        std::cerr << "aliasing rejection: " << e.symbol() << ": " << e.what() << '\n';
        return exit_aliasing;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
