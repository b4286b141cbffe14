#pragma once

#include "sbpc/blocking.hpp"
#include "sbpc/dynamics.hpp"
#include "sbpc/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sbpc {

// Point-to-set distance Delta(x, X) under a weighted infinity norm; the
// weights form the diagonal of the norm.
struct DistanceSpec {
    Vec weights;
};

/// Distance from x to the terminal box: max_i w_i * max(0, |x_i - c_i| - h_i).
/// Zero exactly when x is inside the box.
double distance_to_set(const State& x, const TerminalSet& X_f, const DistanceSpec& spec);

// Admissible input set: either a continuous box or a finite alphabet of
// values, optionally extended with the cruise action.
struct InputSpec {
    enum class Mode { ContinuousBox, Alphabet };

    Mode mode = Mode::Alphabet;
    Vec lower, upper;             // ContinuousBox bounds, sizes = m
    std::vector<Input> alphabet;  // Alphabet entries, in tie-break order
    bool with_cruise = false;     // append the cruise action to the alphabet

    int num_choices() const { return static_cast<int>(alphabet.size()) + (with_cruise ? 1 : 0); }
    Action choice(int idx) const; // idx in [0, num_choices())
    void validate(int input_dim) const;
};

struct SolverOptions {
    // Discrete backend: hard cap on |alphabet|^N.
    std::int64_t candidate_cap = 1'000'000;

    // Continuous backend: multi-start projected coordinate descent.
    int starts = 8;
    int max_sweeps = 200;
    double fd_step = 1e-7;
    double penalty_init = 1e2;
    double penalty_max = 1e8;
    std::uint64_t seed = 1;
};

// One finite-horizon problem instance at step k with measured state x_init.
// The solver variant (nominal / min-gamma / relaxed / multi-objective) is
// chosen by the solve_* entry points.
struct OcpProblem {
    const Model* model = nullptr;
    int k = 0;
    int k_f = 0;
    State x_init;
    BlockingPolicy policy;
    InputSpec input;
    TerminalSet terminal;
    DistanceSpec distance;
    SolverOptions options;

    int horizon() const { return k_f - k; }
    void validate() const;
};

enum class Variant { Nominal, MinGamma, Relaxed, MultiObjective };

struct VariantSpec {
    Variant kind = Variant::Nominal;
    double gamma_bar = 0; // Relaxed: terminal distance budget
    double omega = 0;     // MultiObjective: weight on the terminal slack
};

// Slack added to the relaxed terminal constraint so the min-gamma argmin
// stays admissible under floating point.
inline constexpr double kGammaTol = 1e-9;

struct SolveResult {
    BlockedSequence v_opt;
    std::vector<Input> u_traj; // resolved inputs, length k_f - k
    std::vector<State> x_traj; // predicted states, length k_f - k + 1
    double cost = 0;           // stage-cost sum (terminal summand with the null input)
    double gamma = 0;          // terminal-set distance of the returned trajectory
    bool feasible = false;
    bool local_only = false;   // continuous backend: no global optimality claim
    std::int64_t nodes_explored = 0;
    int restarts = 0;
};

// Full constraint evaluation of one candidate, shared by both backends and
// by the tests.
struct CandidateReport {
    bool eval_ok = true;      // dynamics and cruise resolution succeeded
    int fail_step = -1;
    std::string fail_reason;
    std::vector<State> x_traj;
    std::vector<Input> u_traj;
    double cost = 0;
    double terminal_delta = 0;
    std::vector<std::pair<int, double>> state_violations; // (offset j, excess)
    bool inputs_ok = true;     // continuous values inside the box

    bool state_ok() const { return state_violations.empty(); }
    bool clear() const { return eval_ok && inputs_ok && state_ok(); }
};

CandidateReport check_candidate(const OcpProblem& p, const BlockedSequence& v);

/// Exact enumeration over all |alphabet|^N blocked sequences with
/// branch-and-bound pruning; results are identical to the naive loop,
/// including the tie-break (lexicographically smallest candidate by
/// alphabet index). Throws ArgumentError when the candidate count exceeds
/// options.candidate_cap; switch to the continuous backend in that case.
SolveResult enumerate_backend(const OcpProblem& p, const VariantSpec& variant,
                              const BlockedSequence* warm_start = nullptr);

/// Best-effort local solver for continuous input boxes: multi-start
/// projected coordinate descent with finite-difference gradients and a
/// quadratic penalty on violated constraints. The result is flagged
/// local_only.
SolveResult continuous_backend(const OcpProblem& p, const VariantSpec& variant,
                               const BlockedSequence* warm_start = nullptr);

// Variant front-ends; they dispatch to the backend matching p.input.mode.
SolveResult solve_nominal(const OcpProblem& p, const BlockedSequence* warm_start = nullptr);
/// Always feasible while the state constraints are; throws InfeasibleError
/// when every candidate violates them.
SolveResult solve_min_gamma(const OcpProblem& p, const BlockedSequence* warm_start = nullptr);
SolveResult solve_relaxed(const OcpProblem& p, double gamma_bar, const BlockedSequence* warm_start = nullptr);
SolveResult solve_multiobjective(const OcpProblem& p, double omega, const BlockedSequence* warm_start = nullptr);

} // namespace sbpc
