#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "toeplab/experiments.hpp"

using namespace toeplab;
using namespace toeplab::experiments;

namespace {

std::string csv(const ResultTable& t)
{
    std::ostringstream s;
    write_csv(s, t);
    return s.str();
}

// Drops the trailing wall_ms field from every line.
std::string without_wall_time(const std::string& text)
{
    std::istringstream in(text);
    std::string out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) != 0) {
            line = line.substr(0, line.rfind(','));
        }
        out += line + '\n';
    }
    return out;
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "toeplab_test_experiments";
    std::filesystem::create_directories(dir);
    return dir / name;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(TOEPLAB_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

// ---------------------------------------------------------------------------
// Formats

TEST(ResultTable, CsvLayout)
{
    ResultTable t;
    t.experiment = "demo";
    t.config = {{"model", "circle:M=4,N=9"}, {"seed", "1"}};
    t.columns = {"a", "b"};
    t.add_row({"1", "x"}, 0.5);
    t.add_row({"0.10000000000000001", "y"}, 2.0);
    EXPECT_EQ(csv(t), "# config: command=demo model=circle:M=4,N=9 seed=1\n"
                      "a,b,wall_ms\n"
                      "1,x,0.5\n"
                      "0.10000000000000001,y,2\n");
}

TEST(ResultTable, SummaryJsonSchema)
{
    ResultTable t;
    t.experiment = "demo";
    t.config = {{"z", "1"}, {"a", "2"}};
    t.counts = {{"ok", 3}};
    auto j = nlohmann::ordered_json::parse(summary_json(t));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) {
        keys.push_back(it.key());
    }
    EXPECT_EQ(keys, (std::vector<std::string>{"experiment", "config", "pass", "counts", "worst_margin"}));
    EXPECT_TRUE(j["worst_margin"].is_null());
    EXPECT_EQ(j["config"].begin().key(), "z");

    t.note_margin(0.25);
    t.fail("row 3");
    j = nlohmann::ordered_json::parse(summary_json(t));
    EXPECT_EQ(j["worst_margin"].get<double>(), 0.25);
    EXPECT_FALSE(j["pass"].get<bool>());
    EXPECT_EQ(j["failures"][0], "row 3");
}

TEST(Parsing, ScheduleAndLists)
{
    EXPECT_EQ(parse_schedule("256,512,1024"), (std::vector<int>{256, 512, 1024}));
    EXPECT_EQ(parse_schedule(" 8 , 16 "), (std::vector<int>{8, 16}));
    EXPECT_EQ(format_schedule({8, 16}), "8,16");
    EXPECT_THROW(parse_schedule("16,8"), PreconditionError);
    EXPECT_THROW(parse_schedule("8,,16"), ParseError);
    EXPECT_THROW(parse_schedule("8,x"), ParseError);
    EXPECT_THROW(parse_schedule("0"), ParseError);
    EXPECT_TRUE(parse_list("").empty());
    EXPECT_EQ(parse_list("0.5, 1"), (std::vector<double>{0.5, 1.0}));
    EXPECT_EQ(format_list({0.5, 1.0}), "0.5,1");
    EXPECT_FALSE(parse_method_option("auto").has_value());
    EXPECT_EQ(parse_method_option("power"), NormMethod::power_iteration);
    EXPECT_THROW(parse_method_option("qr"), ParseError);
}

TEST(OrderedMap, ResultsInIndexOrder)
{
    const auto out = ordered_map(50, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) {
        EXPECT_EQ(out[i], static_cast<int>(i * i));
    }
    EXPECT_THROW(ordered_map(10, 3,
                             [](std::size_t i) {
                                 if (i == 7) {
                                     throw PreconditionError("seven");
                                 }
                                 return 0;
                             }),
                 PreconditionError);
}

// ---------------------------------------------------------------------------
// Experiments

TEST(Plancherel, BothModelsPass)
{
    for (const char* model : {"circle:M=64", "line:N=256,h=0.1", "circle:M=16,N=40"}) {
        PlancherelOptions o;
        o.model = model;
        const auto t = run_plancherel(o);
        EXPECT_TRUE(t.pass) << model;
        EXPECT_EQ(t.rows.size(), 100u);
    }
    PlancherelOptions bad;
    bad.model = "circle:M=x";
    EXPECT_THROW(run_plancherel(bad), ParseError);
}

TEST(Plancherel, ReproducibleModuloWallTime)
{
    PlancherelOptions o;
    o.model = "line:N=256,h=0.1";
    o.seed = 7;
    const auto a = csv(run_plancherel(o));
    const auto b = csv(run_plancherel(o));
    EXPECT_EQ(without_wall_time(a), without_wall_time(b));
    o.seed = 8;
    EXPECT_NE(without_wall_time(a), without_wall_time(csv(run_plancherel(o))));
    EXPECT_EQ(lines(a).front(), "# config: command=plancherel model=line:N=256,h=0.1 trials=100 seed=7");
}

TEST(CharacterGrid, EmptyFiniteGridsLeaveTheInfinitySet)
{
    CharacterGridOptions o;
    o.t_values.clear();
    o.gamma_values.clear();
    const auto t = run_character_grid(o);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_TRUE(t.pass);
    EXPECT_EQ(t.counts.at("in-character-space"), 1);
    EXPECT_EQ(t.counts.at("excluded"), 0);
    EXPECT_EQ(t.counts.at("inconclusive"), 0);
}

TEST(CharacterGrid, ThreadsDoNotChangeTheRows)
{
    CharacterGridOptions o;
    o.t_values = {0.0, 2.0};
    o.gamma_values = {1.0};
    o.infinity = false;
    const auto one = run_character_grid(o);
    o.threads = 2;
    const auto two = run_character_grid(o);
    EXPECT_EQ(without_wall_time(csv(one)), without_wall_time(csv(two)));
    EXPECT_EQ(one.counts.at("excluded"), 2);
}

TEST(CharacterGrid, TwoLevelScheduleIsInsufficient)
{
    CharacterGridOptions o;
    o.schedule = "256,512";
    EXPECT_THROW(run_character_grid(o), InsufficientEvidence);
}

TEST(HSBound, DefaultAndRandomPairs)
{
    HSBoundOptions o;
    const auto t = run_hs_bound(o);
    EXPECT_TRUE(t.pass);
    o.random_pairs = 3;
    const auto r = run_hs_bound(o);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.rows.size(), 3u);
    EXPECT_EQ(without_wall_time(csv(r)), without_wall_time(csv(run_hs_bound(o))));
    o.random_pairs = 0;
    o.phi = "gauss:center=0,width=0.05";
    EXPECT_THROW(run_hs_bound(o), AliasingError);
}

TEST(NormSweep, TwoCosineReachesTwo)
{
    const auto t = run_norm_sweep({});
    EXPECT_TRUE(t.pass);
    ASSERT_EQ(t.rows.size(), 5u);
    const auto header = lines(csv(t))[1];
    const auto& last = t.rows.back();
    std::size_t col = 0;
    for (; col < t.columns.size() && t.columns[col] != "norm"; ++col) {
    }
    ASSERT_LT(col, t.columns.size()) << header;
    EXPECT_LT(std::abs(std::stod(last[col]) - 2.0), 1e-4);
}

TEST(WitnessDemo, DefaultPassesAndOffGridFails)
{
    const auto t = run_witness_demo({});
    EXPECT_TRUE(t.pass);
    WitnessDemoOptions o;
    o.t0 = 0.05;
    EXPECT_THROW(run_witness_demo(o), OffGridError);
}

TEST(CommutatorDecay, RejectsUnknownKind)
{
    CommutatorDecayOptions o;
    o.kind = "bogus";
    EXPECT_THROW(run_commutator_decay(o), ParseError);
}

// ---------------------------------------------------------------------------
// Command line

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run_cli("plancherel --trials 5"), 0);
    EXPECT_EQ(run_cli("plancherel --model circle:M=oops"), 2);
    EXPECT_EQ(run_cli("plancherel --bogus 1"), 2);
    EXPECT_EQ(run_cli("no-such-command"), 2);
    EXPECT_EQ(run_cli(""), 2);
    EXPECT_EQ(run_cli("witness-demo --t0 0.05"), 2);
    EXPECT_EQ(run_cli("character-grid --schedule 256,512"), 2);
    EXPECT_EQ(run_cli("hs-bound --phi gauss:center=0,width=0.05"), 4);
    EXPECT_EQ(run_cli("norm-sweep --schedule 8,16 --tolerance 1e-9"), 3);
}

TEST(Cli, AliasingNamesTheSymbol)
{
    const auto err = scratch("aliasing.txt");
    const std::string cmd = std::string(TOEPLAB_CLI) + " hs-bound --phi gauss:center=0,width=0.05 >/dev/null 2>"
                            + err.string();
    EXPECT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 4);
    EXPECT_NE(slurp(err).find("gauss:center=0,width=0.05"), std::string::npos);
}

TEST(Cli, ConfigFileUnderFlags)
{
    const auto config = scratch("plancherel.conf");
    {
        std::ofstream f(config);
        f << "# comment\n\nmodel = line:N=64,h=0.5\ntrials=3\nseed=4\n";
    }
    const auto out = scratch("plancherel.csv");
    const auto json = scratch("plancherel.json");
    ASSERT_EQ(run_cli("plancherel --config " + config.string() + " --trials 5 --out " + out.string() + " --json "
                      + json.string()),
              0);
    const auto rows = lines(slurp(out));
    EXPECT_EQ(rows.front(), "# config: command=plancherel model=line:N=64,h=0.5 trials=5 seed=4");
    EXPECT_EQ(rows.size(), 2u + 5u);
    const auto summary = nlohmann::json::parse(slurp(json));
    EXPECT_TRUE(summary["pass"].get<bool>());
    EXPECT_EQ(summary["config"]["trials"], "5");

    const auto broken = scratch("broken.conf");
    {
        std::ofstream f(broken);
        f << "model\n";
    }
    EXPECT_EQ(run_cli("plancherel --config " + broken.string()), 2);
    EXPECT_EQ(run_cli("plancherel --config /nonexistent/file"), 2);
}

TEST(Cli, ByteIdenticalReruns)
{
    const auto a = scratch("a.csv");
    const auto b = scratch("b.csv");
    ASSERT_EQ(run_cli("hs-bound --pairs 2 --seed 3 --out " + a.string()), 0);
    ASSERT_EQ(run_cli("hs-bound --pairs 2 --seed 3 --out " + b.string()), 0);
    EXPECT_EQ(without_wall_time(slurp(a)), without_wall_time(slurp(b)));
}
