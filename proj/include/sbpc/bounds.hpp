#pragma once

#include "sbpc/controller.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace sbpc {

// Class-K comparison function: continuous, strictly increasing, a(0) = 0.
// Either linear a(s) = K*s (default) or a tabulated increasing polyline
// through the origin. The linear form admits a gain of zero as a degenerate
// case (dynamics insensitive to the argument); tabulated functions must be
// strictly increasing.
class KFunction {
public:
    static KFunction linear(double gain);
    /// Points (s_i, a_i) with 0 < s_1 < s_2 < ... and 0 < a_1 < a_2 < ...;
    /// evaluated by linear interpolation from (0, 0), extrapolating the last
    /// slope beyond the final point.
    static KFunction tabulated(std::vector<std::pair<double, double>> points);

    double operator()(double s) const;

    bool is_linear() const { return linear_; }
    double linear_gain() const;

private:
    KFunction() = default;
    bool linear_ = true;
    double gain_ = 0;
    std::vector<std::pair<double, double>> points_;
};

// Continuity moduli of the dynamics: ||f(x1,u)-f(x2,u)|| <= a_x(||x1-x2||)
// and ||f(x,u1)-f(x,u2)|| <= a_u(||u1-u2||), state deviations measured in
// the same weighted infinity norm as the terminal-set distance.
struct ModuliPair {
    KFunction a_x = KFunction::linear(0);
    KFunction a_u = KFunction::linear(0);
};

/// Worst-case open-loop perturbation bounds: beta_0 = a_u(d_bar),
/// beta_k = a_u(d_bar) + a_x(beta_{k-1}), returned for k = 0..k_f-1.
std::vector<double> beta_sequence(const ModuliPair& moduli, double d_bar, int k_f);

/// Closed-loop terminal accuracy bound: the sum of the beta sequence.
double cumulative_bound(const ModuliPair& moduli, double d_bar, int k_f);

/// Bound on the state deviation after `steps` perturbed steps, i.e.
/// beta_{steps-1}.
double propagate_perturbation_bound(const ModuliPair& moduli, double d_bar, int steps);

struct Box {
    Vec center;
    Vec half_widths;
};

struct ModuliEstimate {
    ModuliPair moduli;   // inflated, ready for the bound recursion
    double k_x_raw = 0;  // sampled supremum before inflation
    double k_u_raw = 0;
    double inflation = 0;
};

/// Samples difference quotients of the dynamics over the given boxes and
/// returns linear moduli. The sampled supremum statistically under-estimates
/// the true Lipschitz constant; the returned moduli are inflated by the
/// safety factor to compensate. State deviations use the weighted infinity
/// norm with `state_weights`. Throws ArgumentError when a box has zero
/// volume or samples < 1000.
ModuliEstimate estimate_moduli(const Model& model, const Box& state_box, const Box& input_box, int samples,
                               const Vec& state_weights, std::uint64_t seed, double safety_factor = 1.2);

struct BoundReport {
    double d_bar = 0;
    int k_f = 0;
    double beta_total = 0;       // bound actually checked (after scaling)
    double max_delta_observed = 0;
    int violations = 0;
    int runs = 0;
    double margin = 0;           // beta_total - max_delta_observed
    double bound_scale = 1.0;
};

/// Monte Carlo check of the terminal accuracy bound: executes `runs`
/// independent closed-loop simulations (run indices 1..runs) and counts
/// terminal distances exceeding bound_scale * beta(d_bar). bound_scale < 1
/// deliberately weakens the bound to exercise the violation detector.
BoundReport verify_bound(const RunConfig& cfg, Algorithm alg, double omega, const ModuliPair& moduli, int runs,
                         double bound_scale = 1.0);

} // namespace sbpc
