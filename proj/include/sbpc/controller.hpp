#pragma once

#include "sbpc/ocp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sbpc {

enum class DisturbanceKind {
    Uniform, // each component uniform on [-d_bar, d_bar]
    Extreme, // each component +/- d_bar with random sign
    Fixed    // user-supplied sequence, clamped to its last entry
};

// Input-channel disturbance model: the plant receives u + d with
// ||d||_inf <= d_bar. The stream is a pure function of (seed, run index, k),
// so runs are reproducible and mutually independent.
struct DisturbanceSpec {
    double d_bar = 0;
    DisturbanceKind kind = DisturbanceKind::Uniform;
    std::uint64_t seed = 0;
    std::vector<Input> fixed;

    void validate(int input_dim) const;
};

Input sample_disturbance(const DisturbanceSpec& spec, int input_dim, std::uint64_t run_index, int k);

enum class Algorithm { Nominal, Relaxed, MultiObjective };

// Everything needed to run one closed-loop simulation.
struct RunConfig {
    const Model* model = nullptr;
    State x0;
    int k_f = 0;
    BlockingPolicy policy;
    InputSpec input;
    TerminalSet terminal;
    DistanceSpec distance;
    SolverOptions solver;
    DisturbanceSpec disturbance;

    OcpProblem problem_at(int k, const State& x) const;
    void validate() const;
};

struct StepRecord {
    int k = 0;
    State x;         // measured state at k
    Input u_cmd;     // commanded input (first element of the solution)
    Input u_applied; // u_cmd + d
    Input d;
    double gamma_lb = 0;   // relaxed: per-step min distance; multiobjective: realized slack
    double solve_cost = 0; // optimal stage-cost objective of the per-step solve
    std::int64_t nodes = 0;
    int restarts = 0;
    double wall_ms = 0;
};

enum class RunStatus {
    Completed,
    InfeasibleAtStart, // nominal FHOCP infeasible at k = 0
    Aborted            // infeasibility mid-run (diagnostic in abort_reason)
};

struct ClosedLoopLog {
    RunStatus status = RunStatus::Completed;
    std::string abort_reason;
    int abort_step = -1;

    std::vector<StepRecord> steps; // k_f entries when completed
    std::vector<State> states;     // k_f + 1 entries when completed

    double terminal_delta = 0; // Delta(x(k_f), X_f)
    double total_cost = 0;     // realized cost along the closed-loop trajectory
    int feasible_steps = 0;

    bool completed() const { return status == RunStatus::Completed; }
};

/// Nominal strategy: at each k solve the nominal FHOCP from the measured
/// state, apply the first element, warm-starting with the previous
/// solution's tail. A disturbance (if configured) is applied to the plant
/// only; mid-run infeasibility aborts with a diagnostic.
ClosedLoopLog run_nominal(const RunConfig& cfg, std::uint64_t run_index = 0);

/// Two-step relaxed strategy: per step, minimize the achievable terminal
/// distance, then minimize cost subject to that distance budget.
ClosedLoopLog run_relaxed(const RunConfig& cfg, std::uint64_t run_index = 0);

/// Relaxed loop with the single multi-objective solve (cost + omega * slack)
/// in place of the two-step pair.
ClosedLoopLog run_multiobjective(const RunConfig& cfg, double omega, std::uint64_t run_index = 0);

ClosedLoopLog run_algorithm(const RunConfig& cfg, Algorithm alg, double omega, std::uint64_t run_index = 0);

} // namespace sbpc
