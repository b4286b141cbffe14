#include "sbpc/bounds.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sbpc;

namespace {

State st(double a, double b)
{
    State x(2);
    x << a, b;
    return x;
}

Input in(double u)
{
    Input v(1);
    v << u;
    return v;
}

Vec vec2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

ModuliPair linear_moduli(double kx, double ku)
{
    return ModuliPair{KFunction::linear(kx), KFunction::linear(ku)};
}

// f(x, u) = c: insensitive to both arguments.
class ConstantModel : public Model {
public:
    int state_dim() const override { return 2; }
    int input_dim() const override { return 1; }
    double sample_time() const override { return 1.0; }
    State step(const State&, const Input&) const override { return st(1.0, 2.0); }
    double stage_cost(const State&, const Input&) const override { return 0.0; }
    ConstraintCheck check_state(const State&) const override { return {}; }
};

RunConfig verify_config(const Model& model, double d_bar)
{
    RunConfig cfg;
    cfg.model = &model;
    cfg.x0 = st(0, 0);
    cfg.k_f = 12;
    cfg.policy = BlockingPolicy{3, BlockingVariant::ShrinkingN};
    cfg.input.mode = InputSpec::Mode::Alphabet;
    for (double a : {-1.0, 0.0, 1.0}) cfg.input.alphabet.push_back(in(a));
    cfg.terminal.center = st(27, 0);
    cfg.terminal.half_widths = vec2(0, 0);
    cfg.terminal.weights = vec2(1, 1);
    cfg.distance.weights = vec2(1, 1);
    cfg.disturbance.d_bar = d_bar;
    cfg.disturbance.seed = 11;
    return cfg;
}

} // namespace

TEST_CASE("K-function forms")
{
    const auto lin = KFunction::linear(2.5);
    CHECK(lin(0) == 0.0);
    CHECK(lin(2) == 5.0);
    CHECK_THROWS_AS(KFunction::linear(-1), ArgumentError);

    const auto tab = KFunction::tabulated({{1.0, 0.5}, {2.0, 2.0}});
    CHECK(tab(0) == 0.0);
    CHECK(tab(0.5) == doctest::Approx(0.25));
    CHECK(tab(1.5) == doctest::Approx(1.25));
    CHECK(tab(3.0) == doctest::Approx(3.5)); // extrapolates the last slope
    CHECK_THROWS_AS(KFunction::tabulated({{1.0, 0.5}, {2.0, 0.5}}), ArgumentError);
    CHECK_THROWS_AS(KFunction::tabulated({{0.0, 0.0}}), ArgumentError);
}

TEST_CASE("beta recursion")
{
    SUBCASE("zero disturbance gives an all-zero sequence")
    {
        const auto beta = beta_sequence(linear_moduli(1.5, 2.0), 0.0, 6);
        for (double b : beta) CHECK(b == 0.0);
        CHECK(cumulative_bound(linear_moduli(1.5, 2.0), 0.0, 6) == 0.0);
    }
    SUBCASE("hand-evaluated linear case")
    {
        const auto beta = beta_sequence(linear_moduli(1.5, 2.0), 0.1, 3);
        REQUIRE(beta.size() == 3);
        CHECK(beta[0] == doctest::Approx(0.2).epsilon(1e-15));
        CHECK(beta[1] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(beta[2] == doctest::Approx(0.95).epsilon(1e-15));
        CHECK(cumulative_bound(linear_moduli(1.5, 2.0), 0.1, 3) == doctest::Approx(1.65).epsilon(1e-15));
    }
    SUBCASE("matches the geometric closed form for linear moduli")
    {
        const double kx = 1.3, ku = 0.7, d = 0.05;
        const auto beta = beta_sequence(linear_moduli(kx, ku), d, 20);
        for (int k = 0; k < 20; ++k) {
            double geo = 0; // ku*d * sum_{i=0..k} kx^i
            for (int i = 0; i <= k; ++i) geo += std::pow(kx, i);
            CHECK(beta[static_cast<std::size_t>(k)] == doctest::Approx(ku * d * geo).epsilon(1e-12));
        }
    }
    SUBCASE("nondecreasing in k and strictly increasing in the bound")
    {
        const auto m = linear_moduli(1.1, 0.5);
        const auto beta = beta_sequence(m, 0.2, 15);
        for (std::size_t k = 1; k < beta.size(); ++k) CHECK(beta[k] >= beta[k - 1]);
        CHECK(cumulative_bound(m, 0.2, 15) > cumulative_bound(m, 0.1, 15));
        double prev = 0;
        for (double d : {0.01, 0.02, 0.05, 0.1, 0.3}) {
            const double b = cumulative_bound(m, d, 15);
            CHECK(b > prev);
            prev = b;
        }
    }
}

TEST_CASE("perturbation propagation bound")
{
    const auto m = linear_moduli(1.5, 2.0);
    const double d = 0.1;
    CHECK(propagate_perturbation_bound(m, d, 1) == doctest::Approx(m.a_u(d)).epsilon(1e-15));
    CHECK(propagate_perturbation_bound(m, d, 2) == doctest::Approx(m.a_u(d) + m.a_x(m.a_u(d))).epsilon(1e-15));
    const auto beta = beta_sequence(m, d, 9);
    for (int s = 1; s <= 9; ++s)
        CHECK(propagate_perturbation_bound(m, d, s) == beta[static_cast<std::size_t>(s - 1)]);
    CHECK_THROWS_AS(propagate_perturbation_bound(m, d, 0), ArgumentError);
}

TEST_CASE("open-loop deviations stay below the propagated bound (Monte Carlo)")
{
    IntegratorModel model(1.0);
    const auto moduli = linear_moduli(2.0, 1.0); // exact constants for T_s = 1
    const double d_bar = 0.1;
    const int k_f = 10;

    // nominal input sequence and trajectory
    std::vector<Input> u_nom;
    std::vector<State> x_nom{st(0, 0)};
    std::mt19937_64 rng(3);
    for (int k = 0; k < k_f; ++k) {
        u_nom.push_back(in(std::uniform_real_distribution<double>(-0.5, 0.5)(rng)));
        x_nom.push_back(model.step(x_nom.back(), u_nom.back()));
    }

    std::vector<double> worst(static_cast<std::size_t>(k_f), 0.0);
    for (int run = 0; run < 2000; ++run) {
        State x = x_nom.front();
        for (int k = 0; k < k_f; ++k) {
            const double d = std::uniform_real_distribution<double>(-d_bar, d_bar)(rng);
            x = model.step(x, u_nom[static_cast<std::size_t>(k)] + in(d));
            const double dev = (x - x_nom[static_cast<std::size_t>(k + 1)]).cwiseAbs().maxCoeff();
            auto& w = worst[static_cast<std::size_t>(k)];
            w = std::max(w, dev);
        }
    }
    for (int s = 1; s <= k_f; ++s) {
        CHECK(worst[static_cast<std::size_t>(s - 1)] <= propagate_perturbation_bound(moduli, d_bar, s));
        CHECK(worst[static_cast<std::size_t>(s - 1)] > 0);
    }
}

TEST_CASE("moduli estimation")
{
    IntegratorModel model(1.0);
    const Box state_box{st(0, 0), vec2(5, 5)};
    const Box input_box{Vec::Zero(1), Vec::Constant(1, 1.0)};

    SUBCASE("recovers the integrator constants within 5% before inflation")
    {
        const auto est = estimate_moduli(model, state_box, input_box, 20000, vec2(1, 1), 17);
        CHECK(est.k_x_raw == doctest::Approx(2.0).epsilon(0.05));
        CHECK(est.k_u_raw == doctest::Approx(1.0).epsilon(0.05));
        CHECK(est.k_x_raw <= 2.0 + 1e-12); // sampling cannot exceed the supremum
        CHECK(est.moduli.a_x.linear_gain() == doctest::Approx(est.k_x_raw * 1.2));
        CHECK(est.inflation == 1.2);
    }
    SUBCASE("estimates are reproducible for a fixed seed")
    {
        const auto a = estimate_moduli(model, state_box, input_box, 2000, vec2(1, 1), 5);
        const auto b = estimate_moduli(model, state_box, input_box, 2000, vec2(1, 1), 5);
        CHECK(a.k_x_raw == b.k_x_raw);
        CHECK(a.k_u_raw == b.k_u_raw);
    }
    SUBCASE("constant dynamics estimate to zero")
    {
        ConstantModel konst;
        const auto est = estimate_moduli(konst, state_box, input_box, 2000, vec2(1, 1), 5);
        CHECK(est.k_x_raw == 0.0);
        CHECK(est.k_u_raw == 0.0);
    }
    SUBCASE("degenerate boxes and low sample counts are rejected")
    {
        CHECK_THROWS_AS(estimate_moduli(model, Box{st(0, 0), vec2(0, 0)}, input_box, 2000, vec2(1, 1), 5),
                        ArgumentError);
        CHECK_THROWS_AS(estimate_moduli(model, state_box, Box{Vec::Zero(1), Vec::Zero(1)}, 2000, vec2(1, 1), 5),
                        ArgumentError);
        CHECK_THROWS_AS(estimate_moduli(model, state_box, input_box, 999, vec2(1, 1), 5), ArgumentError);
    }
}

TEST_CASE("Monte Carlo bound verification")
{
    IntegratorModel model(1.0);
    const auto moduli = linear_moduli(2.0, 1.0);

    SUBCASE("no violations at the exact moduli")
    {
        const auto cfg = verify_config(model, 0.05);
        const auto report = verify_bound(cfg, Algorithm::Relaxed, 0, moduli, 200);
        CHECK(report.violations == 0);
        CHECK(report.max_delta_observed > 0);
        CHECK(report.margin >= 0);
        CHECK(report.runs == 200);
    }
    SUBCASE("zero disturbance is exact")
    {
        const auto cfg = verify_config(model, 0.0);
        const auto report = verify_bound(cfg, Algorithm::Relaxed, 0, moduli, 20);
        CHECK(report.beta_total == 0.0);
        CHECK(report.max_delta_observed == 0.0);
        CHECK(report.violations == 0);
        CHECK(report.margin == 0.0);
    }
    SUBCASE("an artificially shrunk bound is detected")
    {
        const auto cfg = verify_config(model, 0.05);
        const auto honest = verify_bound(cfg, Algorithm::Relaxed, 0, moduli, 50);
        REQUIRE(honest.max_delta_observed > 0);
        // scale the bound below the observed maximum: the detector must fire
        const double scale = 0.5 * honest.max_delta_observed / cumulative_bound(moduli, 0.05, cfg.k_f);
        const auto report = verify_bound(cfg, Algorithm::Relaxed, 0, moduli, 50, scale);
        CHECK(report.violations > 0);
        CHECK(report.margin < 0);
    }
    SUBCASE("nominal runs are rejected")
    {
        const auto cfg = verify_config(model, 0.05);
        CHECK_THROWS_AS(verify_bound(cfg, Algorithm::Nominal, 0, moduli, 5), ArgumentError);
    }
}
