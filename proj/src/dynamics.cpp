#include "sbpc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sbpc {

double weighted_inf_norm(const Vec& x, const Vec& w)
{
    if (x.size() != w.size()) throw ArgumentError("weighted_inf_norm: size mismatch");
    return (w.array() * x.array().abs()).maxCoeff();
}

double inf_norm(const Vec& x)
{
    return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

Input Model::cruise_input(const State&) const
{
    throw CruiseError("cruise mode is not supported by this model");
}

void TrainParams::validate() const
{
    std::ostringstream bad;
    auto req = [&](bool ok, const char* msg) {
        if (!ok) bad << (bad.tellp() > 0 ? "; " : "") << msg;
    };
    req(M > 0, "M must be > 0");
    req(M_s > 0, "M_s must be > 0");
    req(M >= M_s, "M must be >= M_s");
    req(A > 0, "A must be > 0");
    req(B >= 0, "B must be >= 0");
    req(C >= 0, "C must be >= 0");
    req(D >= 0, "D must be >= 0");
    req(g_grav > 0, "g_grav must be > 0");
    req(T_s > 0, "T_s must be > 0");
    req(F_T_max > 0, "F_T_max must be > 0");
    req(P_max > 0, "P_max must be > 0");
    req(F_B_max > 0, "F_B_max must be > 0");
    if (bad.tellp() > 0) throw ArgumentError("TrainParams: " + bad.str());
}

TrackProfile::TrackProfile(std::vector<TrackSegment> segments)
    : segments_(std::move(segments))
{
    if (segments_.empty()) throw ArgumentError("TrackProfile: needs at least one segment");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (!(s.curve_radius > 0)) throw ArgumentError("TrackProfile: curve_radius must be > 0");
        if (!(s.speed_limit > 0)) throw ArgumentError("TrackProfile: speed_limit must be > 0");
        if (i > 0 && !(s.start_pos > segments_[i - 1].start_pos))
            throw ArgumentError("TrackProfile: start positions must be strictly increasing");
    }
}

const TrackSegment& TrackProfile::at(double pos) const
{
    // Last segment whose start is <= pos; positions before the first
    // breakpoint clamp to the first segment.
    auto it = std::upper_bound(segments_.begin(), segments_.end(), pos,
                               [](double p, const TrackSegment& s) { return p < s.start_pos; });
    if (it == segments_.begin()) return segments_.front();
    return *(it - 1);
}

TrackProfile TrackProfile::level(double speed_limit)
{
    return TrackProfile({TrackSegment{0.0, 0.0, 1e12, speed_limit}});
}

void TerminalSet::validate() const
{
    const auto n = center.size();
    if (half_widths.size() != n || weights.size() != n)
        throw ArgumentError("TerminalSet: center/half_widths/weights sizes differ");
    if ((half_widths.array() < 0).any()) throw ArgumentError("TerminalSet: half_widths must be >= 0");
    if ((weights.array() <= 0).any()) throw ArgumentError("TerminalSet: weights must be > 0");
}

namespace {

State checked(State x, const char* model_name)
{
    if (!x.allFinite()) {
        std::ostringstream msg;
        msg << model_name << ": non-finite state after step: [" << x.transpose() << "]";
        throw ModelError(msg.str());
    }
    return x;
}

} // namespace

IntegratorModel::IntegratorModel(double T_s) : T_s_(T_s)
{
    if (!(T_s > 0)) throw ArgumentError("IntegratorModel: T_s must be > 0");
}

State IntegratorModel::step(const State& x, const Input& u) const
{
    State next(2);
    next(0) = x(0) + T_s_ * x(1);
    next(1) = x(1) + T_s_ * u(0);
    return checked(std::move(next), "integrator");
}

double IntegratorModel::stage_cost(const State&, const Input& u) const
{
    return std::abs(u(0));
}

ConstraintCheck IntegratorModel::check_state(const State&) const
{
    return {};
}

double resistive_force(const TrainParams& p, const TrackProfile& profile, const State& x)
{
    const auto& seg = profile.at(x(0));
    const double r_v = p.A + p.B * x(1) + p.C * x(1) * x(1);
    const double r_g = p.M_s * (p.g_grav * std::tan(seg.slope) + p.D / seg.curve_radius);
    return r_v + r_g;
}

double traction_force(const TrainParams& p, const State& x, double u)
{
    const double envelope = std::min(p.F_T_max, p.P_max / std::max(x(1), kTractionSpeedFloor));
    return std::max(u, 0.0) * envelope;
}

double braking_force(const TrainParams& p, const State& x, double u)
{
    if (x(1) <= 0.0) return 0.0; // no reverse motion
    return std::max(-u, 0.0) * p.F_B_max;
}

double cruise_command(const TrainParams& p, const TrackProfile& profile, const State& x)
{
    if (!(x(1) > 0)) throw CruiseError("cruise undefined at zero or negative speed");
    const double f_r = resistive_force(p, profile, x);

    // Residual net force as a function of the command; monotone
    // nonincreasing in u on each branch, so bisection applies.
    double lo, hi;
    auto residual = [&](double u) {
        if (f_r >= 0) return traction_force(p, x, u) - f_r;
        return f_r + braking_force(p, x, u); // want F_B = -f_r
    };
    if (f_r >= 0) {
        lo = 0.0;
        hi = 1.0;
        if (residual(hi) < 0) return 1.0; // required traction unattainable
    } else {
        if (residual(-1.0) < 0) return -1.0; // required braking unattainable
        // residual decreases from u=-1 to u=0; keep residual(lo) <= 0 <= residual(hi)
        lo = 0.0;
        hi = -1.0;
    }
    // Bisect until the interval collapses; well below the 1e-9 tolerance.
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) < 0)
            lo = mid;
        else
            hi = mid;
    }
    return std::clamp(0.5 * (lo + hi), -1.0, 1.0);
}

TrainModel::TrainModel(TrainParams params, TrackProfile profile)
    : params_(std::move(params)), profile_(std::move(profile))
{
    params_.validate();
}

State TrainModel::step(const State& x, const Input& u) const
{
    const double net = traction_force(params_, x, u(0)) - braking_force(params_, x, u(0))
        - resistive_force(params_, profile_, x);
    State next(2);
    next(0) = x(0) + params_.T_s * x(1);
    next(1) = x(1) + params_.T_s * net / params_.M;
    return checked(std::move(next), "train");
}

double TrainModel::stage_cost(const State& x, const Input& u) const
{
    return std::abs(traction_force(params_, x, u(0)) * x(1));
}

ConstraintCheck TrainModel::check_state(const State& x) const
{
    const double limit = profile_.speed_limit(x(0));
    const double excess = std::max(-x(1), x(1) - limit);
    if (excess > 0) return {false, excess};
    return {};
}

Input TrainModel::cruise_input(const State& x) const
{
    Input u(1);
    u(0) = cruise_command(params_, profile_, x);
    return u;
}

} // namespace sbpc
