#pragma once

#include "sbpc/types.hpp"

#include <memory>
#include <vector>

namespace sbpc {

// Physical parameters of the train plant. Units follow the field comments;
// the traction/braking envelope (F_T_max, P_max, F_B_max) parameterizes the
// synthetic force curves.
struct TrainParams {
    double M = 0;       // total mass [kg]
    double M_s = 0;     // static mass [kg], M_s <= M
    double A = 0;       // velocity resistance, constant term [N]
    double B = 0;       // velocity resistance, linear term [N s/m]
    double C = 0;       // velocity resistance, quadratic term [N s^2/m^2]
    double D = 0;       // curvature resistance coefficient [N m]
    double g_grav = 9.81; // gravity [m/s^2]
    double T_s = 1.0;   // sampling period [s]
    double F_T_max = 0; // peak traction force [N]
    double P_max = 0;   // peak traction power [W]
    double F_B_max = 0; // peak braking force [N]

    /// Throws ArgumentError naming every violated field constraint.
    void validate() const;

    bool operator==(const TrainParams&) const = default;
};

// Speed floor inside the power-limited traction branch; keeps P_max/x2
// finite at standstill.
inline constexpr double kTractionSpeedFloor = 0.1; // [m/s]

struct TrackSegment {
    double start_pos = 0;    // [m]
    double slope = 0;        // alpha [rad]
    double curve_radius = 0; // r_c [m], straight track = very large radius
    double speed_limit = 0;  // [m/s]
};

// Piecewise-constant track description ordered by start position. Lookups
// outside the covered range clamp to the nearest segment.
class TrackProfile {
public:
    explicit TrackProfile(std::vector<TrackSegment> segments);

    const TrackSegment& at(double pos) const;
    double speed_limit(double pos) const { return at(pos).speed_limit; }
    const std::vector<TrackSegment>& segments() const { return segments_; }

    /// Single straight, level segment with the given speed limit.
    static TrackProfile level(double speed_limit);

private:
    std::vector<TrackSegment> segments_;
};

// Axis-aligned terminal box. half_widths(i) == 0 encodes an equality
// constraint on coordinate i; weights are the diagonal of the norm used by
// the point-to-set distance.
struct TerminalSet {
    State center;
    Vec half_widths;
    Vec weights;

    void validate() const;
};

struct ConstraintCheck {
    bool satisfied = true;
    double violation = 0; // max constraint excess, 0 when satisfied
};

// Discrete-time plant interface. Implementations are immutable after
// construction; all member functions are pure and safe for concurrent use.
class Model {
public:
    virtual ~Model() = default;

    virtual int state_dim() const = 0;
    virtual int input_dim() const = 0;
    virtual double sample_time() const = 0;

    /// One step of the discrete dynamics x(k+1) = f(x(k), u(k)).
    /// Throws ModelError if the result is non-finite.
    virtual State step(const State& x, const Input& u) const = 0;

    /// Stage cost l(x, u) >= 0.
    virtual double stage_cost(const State& x, const Input& u) const = 0;

    /// Pointwise state constraints (the terminal set is handled separately).
    virtual ConstraintCheck check_state(const State& x) const = 0;

    virtual bool supports_cruise() const { return false; }

    /// Input realizing the cruise mode at state x. Throws CruiseError when
    /// undefined or unsupported.
    virtual Input cruise_input(const State& x) const;

    /// Neutral input used for the terminal summand of the horizon cost.
    Input null_input() const { return Input::Zero(input_dim()); }
};

// Double integrator with forward-Euler position update:
//   pos(k+1) = pos(k) + T_s * vel(k)
//   vel(k+1) = vel(k) + T_s * u(k)
// Stage cost |u|. No state constraints. Exactly solvable, used as a test
// oracle throughout.
class IntegratorModel : public Model {
public:
    explicit IntegratorModel(double T_s = 1.0);

    int state_dim() const override { return 2; }
    int input_dim() const override { return 1; }
    double sample_time() const override { return T_s_; }
    State step(const State& x, const Input& u) const override;
    double stage_cost(const State& x, const Input& u) const override;
    ConstraintCheck check_state(const State& x) const override;

private:
    double T_s_;
};

// Train plant: state (position [m], speed [m/s]), normalized traction
// command u in [-1, 1]. Forward-Euler dynamics driven by the traction,
// braking and resistive forces; stage cost is the absolute traction power.
class TrainModel : public Model {
public:
    TrainModel(TrainParams params, TrackProfile profile);

    int state_dim() const override { return 2; }
    int input_dim() const override { return 1; }
    double sample_time() const override { return params_.T_s; }
    State step(const State& x, const Input& u) const override;
    double stage_cost(const State& x, const Input& u) const override;
    ConstraintCheck check_state(const State& x) const override;
    bool supports_cruise() const override { return true; }
    Input cruise_input(const State& x) const override;

    const TrainParams& params() const { return params_; }
    const TrackProfile& profile() const { return profile_; }

private:
    TrainParams params_;
    TrackProfile profile_;
};

/// Total resistive force F_R(x) = R_v(x2) + R_g(x1) [N].
double resistive_force(const TrainParams& p, const TrackProfile& profile, const State& x);

/// Synthetic traction curve: constant force up to the base speed, constant
/// power above it. Zero for u <= 0; monotone nondecreasing in u.
double traction_force(const TrainParams& p, const State& x, double u);

/// Synthetic braking curve, linear in the command: F_B = max(-u,0)*F_B_max.
/// Zero at standstill (no reverse motion).
double braking_force(const TrainParams& p, const State& x, double u);

/// Cruise inner loop: u balancing traction (uphill) or braking (downhill)
/// against the resistive force, by bisection to 1e-9, clipped to [-1, 1]
/// when the required force is unattainable. Throws CruiseError for x2 <= 0.
double cruise_command(const TrainParams& p, const TrackProfile& profile, const State& x);

} // namespace sbpc
