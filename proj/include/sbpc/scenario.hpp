#pragma once

#include "sbpc/bounds.hpp"
#include "sbpc/controller.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace sbpc {

/// Carries every validation problem found in a scenario file, not just the
/// first; what() joins them.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

// Validated image of a scenario file. Field groups mirror the file sections;
// string-valued enums keep the file's vocabulary.
struct ScenarioFile {
    // [model]
    std::string model_kind = "integrator"; // integrator | train
    double T_s = 1.0;
    std::vector<double> x0 = {0.0, 0.0};
    std::string track_path; // train only, relative to the scenario file
    TrainParams train;      // train only; train.T_s mirrors T_s

    // [horizon]
    int k_f = 1;

    // [blocking]
    int L = 1;
    std::string blocking_variant = "shrinking"; // shrinking | constant

    // [input]
    std::string input_mode = "alphabet"; // alphabet | continuous
    std::vector<double> alphabet;
    bool cruise = false;
    double input_lower = -1.0;
    double input_upper = 1.0;

    // [terminal]
    std::vector<double> terminal_center;
    std::vector<double> terminal_half_widths;
    std::vector<double> terminal_weights = {1.0, 1.0};

    // [disturbance]
    double d_bar = 0.0;
    std::string distribution = "uniform"; // uniform | extreme | fixed
    std::uint64_t seed = 0;
    std::vector<double> fixed_disturbance;

    // [bounds] (optional section; moduli_mode empty when absent)
    std::string moduli_mode; // estimate | linear
    double a_x_gain = 0.0;
    double a_u_gain = 0.0;
    std::vector<double> state_box_center;
    std::vector<double> state_box_half;
    double input_box_center = 0.0;
    double input_box_half = 1.0;
    int moduli_samples = 20000;
    std::uint64_t moduli_seed = 1;

    // [solver]
    std::string backend = "enumerate"; // enumerate | continuous
    std::int64_t candidate_cap = 1'000'000;
    int starts = 8;
    int max_sweeps = 200;
    std::uint64_t solver_seed = 1;

    // [run]
    std::string algorithm = "nominal"; // nominal | relaxed | multiobjective
    double omega = 0.0;
    int runs = 1;
    bool log_timing = false;

    bool operator==(const ScenarioFile&) const = default;
};

/// Parses and validates a scenario file; throws ScenarioError listing every
/// problem with the offending field names.
ScenarioFile parse_scenario(const std::string& path);

/// Parses from an in-memory string (the file body); source names the input
/// in error messages.
ScenarioFile parse_scenario_text(const std::string& text, const std::string& source = "<string>");

/// Canonical text form; parse(serialize(s)) == s on validated structures.
std::string serialize_scenario(const ScenarioFile& s);

// Scenario resolved into runtime objects. Move-only; config.model points at
// the owned model instance.
struct Scenario {
    ScenarioFile file;
    std::unique_ptr<Model> model;
    RunConfig config;
    Algorithm algorithm = Algorithm::Nominal;
    double omega = 0;
    int runs = 1;
    bool log_timing = false;

    bool has_bounds() const { return !file.moduli_mode.empty(); }
};

/// Builds runtime objects from a validated scenario; track files resolve
/// relative to base_dir. Throws ScenarioError on problems that only surface
/// at build time (missing track file, malformed profile).
Scenario build_scenario(ScenarioFile file, const std::string& base_dir);

/// Convenience: parse + build with base_dir taken from the file's location.
Scenario load_scenario(const std::string& path);

/// Moduli for the bound recursion, per the scenario's [bounds] section:
/// supplied linear gains or a sampled estimate. Throws ScenarioError when
/// the scenario has no [bounds] section.
ModuliEstimate resolve_moduli(const Scenario& scenario);

} // namespace sbpc
