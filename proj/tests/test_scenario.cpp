#include "sbpc/scenario.hpp"

#include "sbpc/sim_io.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace sbpc;

namespace {

const char* kMinimalIntegrator = R"(# desk scenario
[model]
kind = integrator
T_s = 1

[horizon]
k_f = 12

[blocking]
L = 3

[input]
mode = alphabet
alphabet = {-1, 0, 1}

[terminal]
center = (27, 0)
half_widths = (0, 0)

[run]
algorithm = nominal
)";

struct TempDir {
    std::filesystem::path path;
    TempDir()
    {
        path = std::filesystem::temp_directory_path()
            / ("sbpc_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int& counter()
    {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name, const std::string& content) const
    {
        const auto p = path / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
};

} // namespace

TEST_CASE("minimal integrator scenario parses with defaults")
{
    const auto s = parse_scenario_text(kMinimalIntegrator);
    CHECK(s.model_kind == "integrator");
    CHECK(s.k_f == 12);
    CHECK(s.L == 3);
    CHECK(s.alphabet == std::vector<double>{-1, 0, 1});
    CHECK(s.blocking_variant == "shrinking");
    CHECK(s.d_bar == 0.0);
    CHECK(s.terminal_weights == std::vector<double>{1, 1});
    CHECK(s.backend == "enumerate");
    CHECK(s.runs == 1);
}

TEST_CASE("driver-assistance alphabet round-trips")
{
    std::string text = kMinimalIntegrator;
    const std::string from = "{-1, 0, 1}";
    text.replace(text.find(from), from.size(), "{-1, 0, 0.5, 0.75, 1}");
    const auto s = parse_scenario_text(text);
    CHECK(s.alphabet == std::vector<double>{-1, 0, 0.5, 0.75, 1});
    const auto again = parse_scenario_text(serialize_scenario(s));
    CHECK(again.alphabet == s.alphabet);
}

TEST_CASE("serialize/parse is the identity on validated scenarios")
{
    auto s = parse_scenario_text(kMinimalIntegrator);
    CHECK(parse_scenario_text(serialize_scenario(s)) == s);

    // a fuller configuration
    s.d_bar = 0.05;
    s.distribution = "extreme";
    s.seed = 123;
    s.algorithm = "multiobjective";
    s.omega = 1e6;
    s.runs = 250;
    s.moduli_mode = "linear";
    s.a_x_gain = 2;
    s.a_u_gain = 1;
    CHECK(parse_scenario_text(serialize_scenario(s)) == s);
}

TEST_CASE("validation errors are collected and name their fields")
{
    std::string text = R"(
[model]
kind = hovercraft

[horizon]
k_f = 12

[blocking]
L = -3

[input]
mode = alphabet
alphabet = {}

[terminal]
center = (0, 0)
half_widths = (0, 0)

[run]
algorithm = nominal
typo_key = 1
)";
    try {
        parse_scenario_text(text);
        CHECK(false);
    } catch (const ScenarioError& e) {
        const std::string msg = e.what();
        CHECK(e.errors().size() >= 4);
        CHECK(msg.find("kind") != std::string::npos);
        CHECK(msg.find("L") != std::string::npos);
        CHECK(msg.find("alphabet") != std::string::npos);
        CHECK(msg.find("typo_key") != std::string::npos);
    }
}

TEST_CASE("cross-field rules")
{
    SUBCASE("multiobjective needs a positive omega")
    {
        std::string text = kMinimalIntegrator;
        const std::string from = "algorithm = nominal";
        text.replace(text.find(from), from.size(), "algorithm = multiobjective");
        CHECK_THROWS_WITH_AS(parse_scenario_text(text), doctest::Contains("omega"), ScenarioError);
    }
    SUBCASE("fixed disturbances must respect the bound")
    {
        std::string text = kMinimalIntegrator;
        text += "\n[disturbance]\nd_bar = 0.1\ndistribution = fixed\nfixed = (0.2)\n";
        CHECK_THROWS_WITH_AS(parse_scenario_text(text), doctest::Contains("fixed"), ScenarioError);
    }
    SUBCASE("backend must match the input mode")
    {
        std::string text = kMinimalIntegrator;
        text += "\n[solver]\nbackend = continuous\n";
        CHECK_THROWS_WITH_AS(parse_scenario_text(text), doctest::Contains("backend"), ScenarioError);
    }
}

TEST_CASE("building an integrator scenario yields a runnable config")
{
    TempDir dir;
    const auto path = dir.file("desk.scn", kMinimalIntegrator);
    const auto sc = load_scenario(path);
    CHECK(sc.algorithm == Algorithm::Nominal);
    CHECK(sc.config.k_f == 12);
    CHECK(sc.config.model->state_dim() == 2);
    const auto log = run_nominal(sc.config);
    CHECK(log.completed());
    CHECK(log.terminal_delta == 0.0);
}

TEST_CASE("train scenarios load their track profile")
{
    TempDir dir;
    dir.file("track.csv",
             "start_pos_m, slope_rad, curve_radius_m, speed_limit_mps\n"
             "0, 0, 1e12, 16\n"
             "700, 0.008, 2500, 16\n"
             "1200, 0, 1e12, 9\n");
    const std::string scenario = R"(
[model]
kind = train
T_s = 5
track = track.csv
M = 400000
M_s = 380000
A = 2400
B = 120
C = 6
D = 6
F_T_max = 300000
P_max = 4500000
F_B_max = 120000

[horizon]
k_f = 60

[blocking]
L = 12

[input]
mode = alphabet
alphabet = {-1, 0, 0.5, 0.75, 1}

[terminal]
center = (2000, 0)
half_widths = (25, 0.4)
weights = (0.04, 2.5)

[run]
algorithm = nominal
)";
    const auto path = dir.file("train.scn", scenario);
    const auto sc = load_scenario(path);
    const auto* train = dynamic_cast<const TrainModel*>(sc.model.get());
    REQUIRE(train != nullptr);
    CHECK(train->profile().segments().size() == 3);
    CHECK(train->profile().speed_limit(1500) == 9.0);
    CHECK(train->params().T_s == 5.0);

    SUBCASE("missing track file is a scenario error")
    {
        const auto bad = dir.file("bad.scn", std::string(scenario).replace(scenario.find("track.csv"), 9, "gone.csv"));
        CHECK_THROWS_AS(load_scenario(bad), ScenarioError);
    }
}

TEST_CASE("track profile reader rejects malformed files")
{
    TempDir dir;
    SUBCASE("wrong header")
    {
        const auto p = dir.file("t.csv", "pos, slope, radius, limit\n0, 0, 1e12, 16\n");
        CHECK_THROWS_WITH_AS(read_track_profile(p), doctest::Contains("header"), ArgumentError);
    }
    SUBCASE("unsorted rows")
    {
        const auto p = dir.file("t.csv",
                                "start_pos_m, slope_rad, curve_radius_m, speed_limit_mps\n"
                                "100, 0, 1e12, 16\n"
                                "50, 0, 1e12, 16\n");
        CHECK_THROWS_AS(read_track_profile(p), ArgumentError);
    }
    SUBCASE("missing columns")
    {
        const auto p = dir.file("t.csv",
                                "start_pos_m, slope_rad, curve_radius_m, speed_limit_mps\n"
                                "0, 0, 1e12\n");
        CHECK_THROWS_WITH_AS(read_track_profile(p), doctest::Contains("columns"), ArgumentError);
    }
}

TEST_CASE("format_double round-trips and is canonical")
{
    CHECK(format_double(0.05) == "0.05");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-7) == "-2.5e-07");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
