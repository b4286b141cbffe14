#include "sbpc/bounds.hpp"

#include "sbpc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace sbpc {

KFunction KFunction::linear(double gain)
{
    if (!(gain >= 0)) throw ArgumentError("KFunction: linear gain must be >= 0");
    KFunction f;
    f.linear_ = true;
    f.gain_ = gain;
    return f;
}

KFunction KFunction::tabulated(std::vector<std::pair<double, double>> points)
{
    if (points.empty()) throw ArgumentError("KFunction: tabulated form needs points");
    double s_prev = 0, a_prev = 0;
    for (const auto& [s, a] : points) {
        if (!(s > s_prev) || !(a > a_prev))
            throw ArgumentError("KFunction: tabulated points must be strictly increasing from (0,0)");
        s_prev = s;
        a_prev = a;
    }
    KFunction f;
    f.linear_ = false;
    f.points_ = std::move(points);
    return f;
}

double KFunction::operator()(double s) const
{
    if (!(s >= 0)) throw ArgumentError("KFunction: argument must be >= 0");
    if (linear_) return gain_ * s;
    double s0 = 0, a0 = 0;
    for (const auto& [s1, a1] : points_) {
        if (s <= s1) return a0 + (a1 - a0) * (s - s0) / (s1 - s0);
        s0 = s1;
        a0 = a1;
    }
    const auto& [sl, al] = points_.back();
    const double slope = points_.size() > 1
        ? (al - points_[points_.size() - 2].second) / (sl - points_[points_.size() - 2].first)
        : al / sl;
    return al + slope * (s - sl);
}

double KFunction::linear_gain() const
{
    if (!linear_) throw ArgumentError("KFunction: not linear");
    return gain_;
}

std::vector<double> beta_sequence(const ModuliPair& moduli, double d_bar, int k_f)
{
    if (!(d_bar >= 0)) throw ArgumentError("beta_sequence: d_bar must be >= 0");
    if (k_f < 1) throw ArgumentError("beta_sequence: k_f must be >= 1");
    std::vector<double> beta(static_cast<std::size_t>(k_f));
    beta[0] = moduli.a_u(d_bar);
    for (int k = 1; k < k_f; ++k)
        beta[static_cast<std::size_t>(k)] = moduli.a_u(d_bar) + moduli.a_x(beta[static_cast<std::size_t>(k - 1)]);
    return beta;
}

double cumulative_bound(const ModuliPair& moduli, double d_bar, int k_f)
{
    const auto beta = beta_sequence(moduli, d_bar, k_f);
    double total = 0;
    for (double b : beta) total += b;
    return total;
}

double propagate_perturbation_bound(const ModuliPair& moduli, double d_bar, int steps)
{
    if (steps < 1) throw ArgumentError("propagate_perturbation_bound: steps must be >= 1");
    return beta_sequence(moduli, d_bar, steps).back();
}

namespace {

double unit_double(std::uint64_t raw) { return static_cast<double>(raw >> 11) * 0x1.0p-53; }

Vec sample_in_box(const Box& box, std::mt19937_64& rng)
{
    Vec v(box.center.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = box.center(i) + (2.0 * unit_double(rng()) - 1.0) * box.half_widths(i);
    return v;
}

} // namespace

ModuliEstimate estimate_moduli(const Model& model, const Box& state_box, const Box& input_box, int samples,
                               const Vec& state_weights, std::uint64_t seed, double safety_factor)
{
    if (samples < 1000) throw ArgumentError("estimate_moduli: needs at least 1000 samples");
    if (state_box.center.size() != model.state_dim() || input_box.center.size() != model.input_dim())
        throw ArgumentError("estimate_moduli: box dimensions do not match the model");
    if (state_box.half_widths.maxCoeff() <= 0)
        throw ArgumentError("estimate_moduli: state box has zero volume");
    if (input_box.half_widths.maxCoeff() <= 0)
        throw ArgumentError("estimate_moduli: input box has zero volume");
    if (state_weights.size() != model.state_dim() || (state_weights.array() <= 0).any())
        throw ArgumentError("estimate_moduli: state weights must be positive");

    std::mt19937_64 rng(seed);
    double k_x = 0, k_u = 0;
    for (int s = 0; s < samples; ++s) {
        const State x1 = sample_in_box(state_box, rng);
        const State x2 = sample_in_box(state_box, rng);
        const Input u = sample_in_box(input_box, rng);
        const double dx = weighted_inf_norm(x1 - x2, state_weights);
        if (dx > 0) {
            try {
                const double df = weighted_inf_norm(model.step(x1, u) - model.step(x2, u), state_weights);
                k_x = std::max(k_x, df / dx);
            } catch (const ModelError&) {
                // skip samples where the dynamics blow up
            }
        }

        const State x = sample_in_box(state_box, rng);
        const Input u1 = sample_in_box(input_box, rng);
        const Input u2 = sample_in_box(input_box, rng);
        const double du = inf_norm(u1 - u2);
        if (du > 0) {
            try {
                const double df = weighted_inf_norm(model.step(x, u1) - model.step(x, u2), state_weights);
                k_u = std::max(k_u, df / du);
            } catch (const ModelError&) {
            }
        }
    }

    ModuliEstimate est;
    est.k_x_raw = k_x;
    est.k_u_raw = k_u;
    est.inflation = safety_factor;
    est.moduli.a_x = KFunction::linear(k_x * safety_factor);
    est.moduli.a_u = KFunction::linear(k_u * safety_factor);
    return est;
}

BoundReport verify_bound(const RunConfig& cfg, Algorithm alg, double omega, const ModuliPair& moduli, int runs,
                         double bound_scale)
{
    if (runs < 1) throw ArgumentError("verify_bound: runs must be >= 1");
    if (alg == Algorithm::Nominal)
        throw ArgumentError("verify_bound: requires the relaxed or multi-objective algorithm");

    BoundReport report;
    report.d_bar = cfg.disturbance.d_bar;
    report.k_f = cfg.k_f;
    report.runs = runs;
    report.bound_scale = bound_scale;
    report.beta_total = bound_scale * cumulative_bound(moduli, cfg.disturbance.d_bar, cfg.k_f);

    std::vector<double> deltas(static_cast<std::size_t>(runs), 0.0);
    std::vector<char> completed(static_cast<std::size_t>(runs), 0);
    parallel_for(runs, [&](int i) {
        const auto log = run_algorithm(cfg, alg, omega, static_cast<std::uint64_t>(i) + 1);
        completed[static_cast<std::size_t>(i)] = log.completed() ? 1 : 0;
        deltas[static_cast<std::size_t>(i)] = log.completed() ? log.terminal_delta : 0.0;
    });

    for (int i = 0; i < runs; ++i) {
        if (!completed[static_cast<std::size_t>(i)])
            throw InfeasibleError("verify_bound: run " + std::to_string(i + 1) + " aborted before k_f");
        report.max_delta_observed = std::max(report.max_delta_observed, deltas[static_cast<std::size_t>(i)]);
        if (deltas[static_cast<std::size_t>(i)] > report.beta_total) ++report.violations;
    }
    report.margin = report.beta_total - report.max_delta_observed;
    return report;
}

} // namespace sbpc
