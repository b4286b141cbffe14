#include "sbpc/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace sbpc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Constraint tolerance defining feasibility of penalty-based (continuous)
// solutions; the exact backend needs none.
constexpr double kSoftFeasTol = 1e-6;
} // namespace

double distance_to_set(const State& x, const TerminalSet& X_f, const DistanceSpec& spec)
{
    double d = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double excess = std::abs(x(i) - X_f.center(i)) - X_f.half_widths(i);
        if (excess > 0) d = std::max(d, spec.weights(i) * excess);
    }
    return d;
}

Action InputSpec::choice(int idx) const
{
    const int n_alpha = static_cast<int>(alphabet.size());
    if (idx < 0 || idx >= num_choices()) throw ArgumentError("InputSpec: choice index out of range");
    if (idx < n_alpha) return Action::discrete(idx, alphabet[static_cast<std::size_t>(idx)]);
    return Action::cruise(idx);
}

void InputSpec::validate(int input_dim) const
{
    if (mode == Mode::ContinuousBox) {
        if (lower.size() != input_dim || upper.size() != input_dim)
            throw ArgumentError("InputSpec: box bounds must have the input dimension");
        if ((lower.array() > upper.array()).any())
            throw ArgumentError("InputSpec: lower bound exceeds upper bound");
        if (with_cruise) throw ArgumentError("InputSpec: cruise requires an alphabet input set");
    } else {
        if (alphabet.empty() && !with_cruise) throw ArgumentError("InputSpec: alphabet is empty");
        for (const auto& a : alphabet)
            if (a.size() != input_dim) throw ArgumentError("InputSpec: alphabet entry has wrong dimension");
    }
}

void OcpProblem::validate() const
{
    if (model == nullptr) throw ArgumentError("OcpProblem: model is null");
    if (k_f < 1 || k < 0 || k > k_f - 1) throw ArgumentError("OcpProblem: k must lie in [0, k_f-1]");
    if (x_init.size() != model->state_dim()) throw ArgumentError("OcpProblem: x_init has wrong dimension");
    if (!x_init.allFinite()) throw ArgumentError("OcpProblem: x_init is not finite");
    input.validate(model->input_dim());
    terminal.validate();
    if (distance.weights.size() != model->state_dim() || (distance.weights.array() <= 0).any())
        throw ArgumentError("OcpProblem: distance weights must be positive and state-sized");
}

namespace {

Input resolve_action(const Model& model, const Action& a, const State& x)
{
    if (a.kind == Action::Kind::Cruise) return model.cruise_input(x);
    return a.u;
}

} // namespace

CandidateReport check_candidate(const OcpProblem& p, const BlockedSequence& v)
{
    p.validate();
    if (v.k_origin != p.k || v.k_f != p.k_f)
        throw ArgumentError("check_candidate: sequence does not match the problem step");
    const auto actions = expand(v, p.k);

    CandidateReport rep;
    rep.x_traj.reserve(actions.size() + 1);
    rep.u_traj.reserve(actions.size());
    rep.x_traj.push_back(p.x_init);

    State x = p.x_init;
    for (std::size_t j = 0; j < actions.size(); ++j) {
        Input u;
        try {
            u = resolve_action(*p.model, actions[j], x);
            rep.cost += p.model->stage_cost(x, u);
            x = p.model->step(x, u);
        } catch (const std::runtime_error& e) {
            rep.eval_ok = false;
            rep.fail_step = static_cast<int>(j);
            rep.fail_reason = e.what();
            return rep;
        }
        if (p.input.mode == InputSpec::Mode::ContinuousBox) {
            if ((u.array() < p.input.lower.array() - 1e-12).any()
                || (u.array() > p.input.upper.array() + 1e-12).any())
                rep.inputs_ok = false;
        }
        rep.u_traj.push_back(u);
        rep.x_traj.push_back(x);
        const auto chk = p.model->check_state(x);
        if (!chk.satisfied) rep.state_violations.emplace_back(static_cast<int>(j) + 1, chk.violation);
    }
    rep.cost += p.model->stage_cost(x, p.model->null_input());
    rep.terminal_delta = distance_to_set(x, p.terminal, p.distance);
    return rep;
}

namespace {

// ---------------------------------------------------------------------------
// Exact discrete backend
// ---------------------------------------------------------------------------

struct IncumbentState {
    double objective = kInf;
    std::vector<int> choices; // alphabet indices per block
    bool internal = false;    // found by this search (wins ties over a warm start)
    bool have = false;
};

struct DfsSearch {
    const OcpProblem& p;
    const VariantSpec& variant;
    std::vector<int> lengths;
    int n_choices = 0;
    std::int64_t nodes = 0;
    IncumbentState best;
    std::vector<int> current;

    bool cost_prunable() const { return variant.kind != Variant::MinGamma; }

    double leaf_objective(double stage_cost, double delta, bool& admissible) const
    {
        admissible = true;
        switch (variant.kind) {
        case Variant::Nominal:
            admissible = (delta == 0.0);
            return stage_cost;
        case Variant::MinGamma:
            return delta;
        case Variant::Relaxed:
            admissible = (delta <= variant.gamma_bar + kGammaTol);
            return stage_cost;
        case Variant::MultiObjective:
            return stage_cost + variant.omega * delta;
        }
        return kInf;
    }

    void offer(double objective, const std::vector<int>& choices, bool internal)
    {
        if (!best.have || objective < best.objective
            || (objective == best.objective && !best.internal && internal)) {
            best.objective = objective;
            best.choices = choices;
            best.internal = internal;
            best.have = true;
        }
    }

    // depth: block being assigned; x: state at that block's start;
    // partial_cost: stage cost accumulated so far (nonnegative terms only,
    // hence a valid lower bound on every completion).
    void descend(std::size_t depth, const State& x, double partial_cost)
    {
        if (depth == lengths.size()) {
            double total = partial_cost + p.model->stage_cost(x, p.model->null_input());
            const double delta = distance_to_set(x, p.terminal, p.distance);
            bool admissible = true;
            const double objective = leaf_objective(total, delta, admissible);
            if (admissible) offer(objective, current, true);
            return;
        }
        for (int c = 0; c < n_choices; ++c) {
            ++nodes;
            if (best.have && cost_prunable()) {
                // Ties are pruned only once the incumbent came from this
                // search; DFS order then guarantees the incumbent is the
                // lexicographically smallest optimum.
                if (partial_cost > best.objective) continue;
                if (partial_cost == best.objective && best.internal) continue;
            }
            const Action action = p.input.choice(c);
            State xs = x;
            double cost = partial_cost;
            bool ok = true;
            for (int r = 0; r < lengths[depth]; ++r) {
                Input u;
                try {
                    u = resolve_action(*p.model, action, xs);
                    cost += p.model->stage_cost(xs, u);
                    xs = p.model->step(xs, u);
                } catch (const std::runtime_error&) {
                    ok = false;
                    break;
                }
                if (!p.model->check_state(xs).satisfied) {
                    ok = false; // hard violation: no completion can repair it
                    break;
                }
                if (best.have && cost_prunable()
                    && (cost > best.objective || (cost == best.objective && best.internal)))
                {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            current[depth] = c;
            descend(depth + 1, xs, cost);
        }
    }
};

BlockedSequence sequence_from_choices(const OcpProblem& p, const std::vector<int>& choices)
{
    BlockedSequence seq;
    seq.k_origin = p.k;
    seq.k_f = p.k_f;
    seq.policy = p.policy;
    seq.values.reserve(choices.size());
    for (int c : choices) seq.values.push_back(p.input.choice(c));
    return seq;
}

SolveResult result_from_candidate(const OcpProblem& p, BlockedSequence seq, std::int64_t nodes, int restarts,
                                  bool local_only)
{
    auto rep = check_candidate(p, seq);
    SolveResult res;
    res.v_opt = std::move(seq);
    res.u_traj = std::move(rep.u_traj);
    res.x_traj = std::move(rep.x_traj);
    res.cost = rep.cost;
    res.gamma = rep.terminal_delta;
    res.feasible = true;
    res.local_only = local_only;
    res.nodes_explored = nodes;
    res.restarts = restarts;
    return res;
}

SolveResult infeasible_result(std::int64_t nodes, int restarts, bool local_only)
{
    SolveResult res;
    res.feasible = false;
    res.local_only = local_only;
    res.nodes_explored = nodes;
    res.restarts = restarts;
    return res;
}

} // namespace

SolveResult enumerate_backend(const OcpProblem& p, const VariantSpec& variant, const BlockedSequence* warm_start)
{
    p.validate();
    if (p.input.mode != InputSpec::Mode::Alphabet)
        throw ArgumentError("enumerate_backend: requires a discrete alphabet input set");

    const int n = num_blocks(p.k, p.k_f, p.policy);
    const int choices = p.input.num_choices();
    std::int64_t count = 1;
    for (int i = 0; i < n; ++i) {
        if (count > p.options.candidate_cap / choices) {
            std::ostringstream msg;
            msg << "enumerate_backend: " << choices << "^" << n << " candidates exceed the cap of "
                << p.options.candidate_cap << "; use the continuous backend or a coarser blocking";
            throw ArgumentError(msg.str());
        }
        count *= choices;
    }

    DfsSearch search{p, variant, block_lengths(p.k, p.k_f, p.policy), choices, 0, {}, {}};
    search.current.assign(static_cast<std::size_t>(n), 0);

    if (warm_start != nullptr) {
        if (warm_start->k_origin != p.k || warm_start->k_f != p.k_f)
            throw ArgumentError("enumerate_backend: warm start does not match the problem step");
        const auto rep = check_candidate(p, *warm_start);
        if (rep.clear()) {
            bool admissible = true;
            const double obj = search.leaf_objective(rep.cost, rep.terminal_delta, admissible);
            if (admissible) {
                std::vector<int> idx;
                idx.reserve(warm_start->values.size());
                bool indexed = true;
                for (const auto& a : warm_start->values) {
                    if (a.index < 0 || a.index >= choices) indexed = false;
                    idx.push_back(a.index);
                }
                if (indexed) search.offer(obj, idx, /*internal=*/false);
            }
        }
    }

    search.descend(0, p.x_init, 0.0);

    if (!search.best.have) return infeasible_result(search.nodes, 0, false);
    return result_from_candidate(p, sequence_from_choices(p, search.best.choices), search.nodes, 0, false);
}

namespace {

// ---------------------------------------------------------------------------
// Continuous backend
// ---------------------------------------------------------------------------

struct PenaltyObjective {
    const OcpProblem& p;
    const VariantSpec& variant;
    std::int64_t evals = 0;
    std::int64_t failures = 0;

    struct Eval {
        double objective = kInf;
        bool ok = false;
    };

    Eval operator()(const std::vector<double>& flat, double mu)
    {
        ++evals;
        const int m = p.model->input_dim();
        State x = p.x_init;
        double cost = 0;
        double viol2 = 0;
        const auto lengths = block_lengths(p.k, p.k_f, p.policy);
        std::size_t blk = 0;
        int used = 0;
        try {
            for (int j = 0; j < p.horizon(); ++j) {
                if (used == lengths[blk]) {
                    ++blk;
                    used = 0;
                }
                Input u(m);
                for (int i = 0; i < m; ++i) u(i) = flat[blk * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)];
                cost += p.model->stage_cost(x, u);
                x = p.model->step(x, u);
                ++used;
                const auto chk = p.model->check_state(x);
                if (!chk.satisfied) viol2 += chk.violation * chk.violation;
            }
        } catch (const std::runtime_error&) {
            ++failures;
            return {};
        }
        cost += p.model->stage_cost(x, p.model->null_input());
        const double delta = distance_to_set(x, p.terminal, p.distance);

        double obj = kInf;
        switch (variant.kind) {
        case Variant::Nominal:
            obj = cost + mu * (delta * delta + viol2);
            break;
        case Variant::MinGamma:
            obj = delta + mu * viol2;
            break;
        case Variant::Relaxed: {
            const double excess = std::max(0.0, delta - variant.gamma_bar - kGammaTol);
            obj = cost + mu * (excess * excess + viol2);
            break;
        }
        case Variant::MultiObjective:
            obj = cost + variant.omega * delta + mu * viol2;
            break;
        }
        return {obj, true};
    }
};

bool variant_admissible(const VariantSpec& variant, const CandidateReport& rep)
{
    if (!rep.clear()) return false;
    double worst = 0;
    for (const auto& v : rep.state_violations) worst = std::max(worst, v.second);
    switch (variant.kind) {
    case Variant::Nominal:
        return rep.terminal_delta <= kSoftFeasTol;
    case Variant::Relaxed:
        return rep.terminal_delta <= variant.gamma_bar + kGammaTol + kSoftFeasTol;
    default:
        return true;
    }
}

double variant_score(const VariantSpec& variant, const CandidateReport& rep)
{
    switch (variant.kind) {
    case Variant::MinGamma:
        return rep.terminal_delta;
    case Variant::MultiObjective:
        return rep.cost + variant.omega * rep.terminal_delta;
    default:
        return rep.cost;
    }
}

} // namespace

SolveResult continuous_backend(const OcpProblem& p, const VariantSpec& variant, const BlockedSequence* warm_start)
{
    p.validate();
    if (p.input.mode != InputSpec::Mode::ContinuousBox)
        throw ArgumentError("continuous_backend: requires a continuous input box");

    const int n = num_blocks(p.k, p.k_f, p.policy);
    const int m = p.model->input_dim();
    const std::size_t dims = static_cast<std::size_t>(n) * static_cast<std::size_t>(m);

    std::vector<double> lower(dims), upper(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        lower[d] = p.input.lower(static_cast<Eigen::Index>(d % static_cast<std::size_t>(m)));
        upper[d] = p.input.upper(static_cast<Eigen::Index>(d % static_cast<std::size_t>(m)));
    }
    auto clamp_vec = [&](std::vector<double>& v) {
        for (std::size_t d = 0; d < dims; ++d) v[d] = std::clamp(v[d], lower[d], upper[d]);
    };

    PenaltyObjective objective{p, variant};

    auto minimize_from = [&](std::vector<double> v) {
        clamp_vec(v);
        for (double mu = p.options.penalty_init; mu <= p.options.penalty_max; mu *= 10.0) {
            auto cur = objective(v, mu);
            for (int sweep = 0; sweep < p.options.max_sweeps; ++sweep) {
                bool improved = false;
                for (std::size_t d = 0; d < dims; ++d) {
                    const double h = p.options.fd_step * (1.0 + std::abs(v[d]));
                    auto probe = [&](double value) {
                        const double orig = v[d];
                        v[d] = std::clamp(value, lower[d], upper[d]);
                        auto e = objective(v, mu);
                        v[d] = orig;
                        return e;
                    };
                    const auto plus = probe(v[d] + h);
                    const auto minus = probe(v[d] - h);
                    if (!plus.ok && !minus.ok) continue;
                    const double g = (plus.objective - minus.objective) / (2 * h);
                    const double dir = g > 0 ? -1.0 : 1.0;
                    if (g == 0) continue;
                    double step = upper[d] - lower[d];
                    while (step > 1e-13) {
                        const auto trial = probe(v[d] + dir * step);
                        if (trial.ok && trial.objective < cur.objective) {
                            v[d] = std::clamp(v[d] + dir * step, lower[d], upper[d]);
                            cur = trial;
                            improved = true;
                        } else {
                            step *= 0.5;
                        }
                    }
                }
                if (!improved) break;
            }
        }
        return v;
    };

    std::vector<std::vector<double>> starts;
    if (warm_start != nullptr && warm_start->k_origin == p.k
        && static_cast<int>(warm_start->values.size()) == n) {
        std::vector<double> v(dims);
        for (int b = 0; b < n; ++b)
            for (int i = 0; i < m; ++i)
                v[static_cast<std::size_t>(b * m + i)] = warm_start->values[static_cast<std::size_t>(b)].u(i);
        starts.push_back(std::move(v));
    }
    {
        std::vector<double> zeros(dims, 0.0);
        starts.push_back(std::move(zeros));
        std::vector<double> center(dims);
        for (std::size_t d = 0; d < dims; ++d) center[d] = 0.5 * (lower[d] + upper[d]);
        starts.push_back(std::move(center));
    }
    std::mt19937_64 rng(p.options.seed);
    while (static_cast<int>(starts.size()) < p.options.starts) {
        std::vector<double> v(dims);
        for (std::size_t d = 0; d < dims; ++d) {
            const double t = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            v[d] = lower[d] + t * (upper[d] - lower[d]);
        }
        starts.push_back(std::move(v));
    }

    std::optional<CandidateReport> best_rep;
    BlockedSequence best_seq;
    bool best_admissible = false;
    for (auto& s : starts) {
        const auto v = minimize_from(std::move(s));
        BlockedSequence seq;
        seq.k_origin = p.k;
        seq.k_f = p.k_f;
        seq.policy = p.policy;
        for (int b = 0; b < n; ++b) {
            Input u(m);
            for (int i = 0; i < m; ++i) u(i) = v[static_cast<std::size_t>(b * m + i)];
            seq.values.push_back(Action::continuous(std::move(u)));
        }
        auto rep = check_candidate(p, seq);
        if (!rep.eval_ok) continue;
        const bool admissible = variant_admissible(variant, rep);
        const double score = variant_score(variant, rep);
        bool take = false;
        if (!best_rep)
            take = true;
        else if (admissible != best_admissible)
            take = admissible;
        else
            take = score < variant_score(variant, *best_rep);
        if (take) {
            best_rep = std::move(rep);
            best_seq = std::move(seq);
            best_admissible = admissible;
        }
    }

    if (!best_rep) {
        if (objective.failures > 0)
            throw ModelError("continuous_backend: every start failed dynamics evaluation");
        return infeasible_result(objective.evals, static_cast<int>(starts.size()), true);
    }

    auto res = result_from_candidate(p, std::move(best_seq), objective.evals, static_cast<int>(starts.size()), true);
    res.feasible = best_admissible;
    return res;
}

namespace {

SolveResult dispatch(const OcpProblem& p, const VariantSpec& variant, const BlockedSequence* warm)
{
    if (p.input.mode == InputSpec::Mode::Alphabet) return enumerate_backend(p, variant, warm);
    return continuous_backend(p, variant, warm);
}

} // namespace

SolveResult solve_nominal(const OcpProblem& p, const BlockedSequence* warm_start)
{
    return dispatch(p, VariantSpec{Variant::Nominal}, warm_start);
}

SolveResult solve_min_gamma(const OcpProblem& p, const BlockedSequence* warm_start)
{
    auto res = dispatch(p, VariantSpec{Variant::MinGamma}, warm_start);
    if (!res.feasible)
        throw InfeasibleError("solve_min_gamma: every candidate violates a hard state constraint");
    return res;
}

SolveResult solve_relaxed(const OcpProblem& p, double gamma_bar, const BlockedSequence* warm_start)
{
    if (!(gamma_bar >= 0)) throw ArgumentError("solve_relaxed: gamma_bar must be >= 0");
    VariantSpec v;
    v.kind = Variant::Relaxed;
    v.gamma_bar = gamma_bar;
    return dispatch(p, v, warm_start);
}

SolveResult solve_multiobjective(const OcpProblem& p, double omega, const BlockedSequence* warm_start)
{
    if (!(omega > 0)) throw ArgumentError("solve_multiobjective: omega must be > 0");
    VariantSpec v;
    v.kind = Variant::MultiObjective;
    v.omega = omega;
    return dispatch(p, v, warm_start);
}

} // namespace sbpc
