#include "sbpc/controller.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace sbpc {

void DisturbanceSpec::validate(int input_dim) const
{
    if (!(d_bar >= 0)) throw ArgumentError("DisturbanceSpec: d_bar must be >= 0");
    if (kind == DisturbanceKind::Fixed) {
        if (fixed.empty()) throw ArgumentError("DisturbanceSpec: fixed distribution needs values");
        for (const auto& d : fixed) {
            if (d.size() != input_dim) throw ArgumentError("DisturbanceSpec: fixed value has wrong dimension");
            if (inf_norm(d) > d_bar + 1e-12) throw ArgumentError("DisturbanceSpec: fixed value exceeds d_bar");
        }
    }
}

namespace {

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// [0, 1) from the top 53 bits; fully specified, engine-independent mapping.
double unit_double(std::uint64_t raw) { return static_cast<double>(raw >> 11) * 0x1.0p-53; }

} // namespace

Input sample_disturbance(const DisturbanceSpec& spec, int input_dim, std::uint64_t run_index, int k)
{
    if (spec.d_bar == 0 && spec.kind != DisturbanceKind::Fixed) return Input::Zero(input_dim);
    switch (spec.kind) {
    case DisturbanceKind::Fixed: {
        const auto idx = std::min<std::size_t>(static_cast<std::size_t>(k), spec.fixed.size() - 1);
        return spec.fixed[idx];
    }
    case DisturbanceKind::Uniform:
    case DisturbanceKind::Extreme: {
        std::mt19937_64 rng(splitmix64(spec.seed) ^ splitmix64(run_index * 0x51ab61c3ULL + static_cast<std::uint64_t>(k) + 1));
        Input d(input_dim);
        for (int i = 0; i < input_dim; ++i) {
            const std::uint64_t raw = rng();
            if (spec.kind == DisturbanceKind::Uniform)
                d(i) = (2.0 * unit_double(raw) - 1.0) * spec.d_bar;
            else
                d(i) = (raw & 1ULL) ? spec.d_bar : -spec.d_bar;
        }
        return d;
    }
    }
    return Input::Zero(input_dim);
}

OcpProblem RunConfig::problem_at(int k, const State& x) const
{
    OcpProblem p;
    p.model = model;
    p.k = k;
    p.k_f = k_f;
    p.x_init = x;
    p.policy = policy;
    p.input = input;
    p.terminal = terminal;
    p.distance = distance;
    p.options = solver;
    return p;
}

void RunConfig::validate() const
{
    if (model == nullptr) throw ArgumentError("RunConfig: model is null");
    if (k_f < 1) throw ArgumentError("RunConfig: k_f must be >= 1");
    if (x0.size() != model->state_dim()) throw ArgumentError("RunConfig: x0 has wrong dimension");
    input.validate(model->input_dim());
    terminal.validate();
    disturbance.validate(model->input_dim());
    problem_at(0, x0).validate();
}

namespace {

struct StepSolve {
    SolveResult result;
    double gamma_lb = 0;
    double wall_ms = 0;
    bool feasible = true;
    std::string diagnostic;
};

ClosedLoopLog run_loop(const RunConfig& cfg, Algorithm alg, double omega, std::uint64_t run_index)
{
    cfg.validate();
    if (alg == Algorithm::MultiObjective && !(omega > 0))
        throw ArgumentError("run_multiobjective: omega must be > 0");

    ClosedLoopLog log;
    log.states.reserve(static_cast<std::size_t>(cfg.k_f) + 1);
    log.steps.reserve(static_cast<std::size_t>(cfg.k_f));

    State x = cfg.x0;
    log.states.push_back(x);
    BlockedSequence previous;
    bool have_previous = false;

    for (int k = 0; k < cfg.k_f; ++k) {
        const auto p = cfg.problem_at(k, x);
        BlockedSequence tail;
        const BlockedSequence* warm = nullptr;
        if (have_previous) {
            tail = warm_start_tail(previous);
            warm = &tail;
        }

        StepSolve s;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            switch (alg) {
            case Algorithm::Nominal: {
                s.result = solve_nominal(p, warm);
                if (!s.result.feasible) {
                    s.feasible = false;
                    s.diagnostic = "nominal FHOCP infeasible at k=" + std::to_string(k);
                }
                break;
            }
            case Algorithm::Relaxed: {
                const auto stage_a = solve_min_gamma(p, warm);
                s.gamma_lb = stage_a.gamma;
                s.result = solve_relaxed(p, stage_a.gamma, warm);
                s.result.nodes_explored += stage_a.nodes_explored;
                if (!s.result.feasible) {
                    // By construction step (b) admits step (a)'s argmin; only
                    // numeric trouble can land here.
                    s.feasible = false;
                    s.diagnostic = "relaxed FHOCP infeasible at k=" + std::to_string(k);
                }
                break;
            }
            case Algorithm::MultiObjective: {
                s.result = solve_multiobjective(p, omega, warm);
                s.gamma_lb = s.result.gamma;
                if (!s.result.feasible) {
                    s.feasible = false;
                    s.diagnostic = "multi-objective FHOCP infeasible at k=" + std::to_string(k);
                }
                break;
            }
            }
        } catch (const InfeasibleError& e) {
            s.feasible = false;
            s.diagnostic = e.what();
        }
        const auto t1 = std::chrono::steady_clock::now();
        s.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

        if (!s.feasible) {
            if (k == 0 && alg == Algorithm::Nominal) {
                log.status = RunStatus::InfeasibleAtStart;
                log.abort_reason = s.diagnostic;
                log.abort_step = 0;
            } else {
                log.status = RunStatus::Aborted;
                log.abort_reason = s.diagnostic;
                log.abort_step = k;
            }
            return log;
        }

        ++log.feasible_steps;
        const Input u_cmd = s.result.u_traj.front();
        const Input d = sample_disturbance(cfg.disturbance, cfg.model->input_dim(), run_index, k);
        const Input u_applied = u_cmd + d;

        StepRecord rec;
        rec.k = k;
        rec.x = x;
        rec.u_cmd = u_cmd;
        rec.u_applied = u_applied;
        rec.d = d;
        rec.gamma_lb = s.gamma_lb;
        rec.solve_cost = s.result.cost;
        rec.nodes = s.result.nodes_explored;
        rec.restarts = s.result.restarts;
        rec.wall_ms = s.wall_ms;

        log.total_cost += cfg.model->stage_cost(x, u_applied);
        x = cfg.model->step(x, u_applied);
        log.states.push_back(x);
        log.steps.push_back(std::move(rec));

        previous = s.result.v_opt;
        have_previous = true;
    }

    log.total_cost += cfg.model->stage_cost(x, cfg.model->null_input());
    log.terminal_delta = distance_to_set(x, cfg.terminal, cfg.distance);
    return log;
}

} // namespace

ClosedLoopLog run_nominal(const RunConfig& cfg, std::uint64_t run_index)
{
    return run_loop(cfg, Algorithm::Nominal, 0, run_index);
}

ClosedLoopLog run_relaxed(const RunConfig& cfg, std::uint64_t run_index)
{
    return run_loop(cfg, Algorithm::Relaxed, 0, run_index);
}

ClosedLoopLog run_multiobjective(const RunConfig& cfg, double omega, std::uint64_t run_index)
{
    return run_loop(cfg, Algorithm::MultiObjective, omega, run_index);
}

ClosedLoopLog run_algorithm(const RunConfig& cfg, Algorithm alg, double omega, std::uint64_t run_index)
{
    return run_loop(cfg, alg, omega, run_index);
}

} // namespace sbpc
