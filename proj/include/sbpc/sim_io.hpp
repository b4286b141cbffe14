#pragma once

#include "sbpc/bounds.hpp"
#include "sbpc/controller.hpp"
#include "sbpc/dynamics.hpp"

#include <iosfwd>
#include <string>

namespace sbpc {

/// Shortest decimal representation that round-trips the exact double;
/// deterministic across runs, used for every emitted number.
std::string format_double(double v);

/// Reads a track profile: delimited text with the header row
/// `start_pos_m, slope_rad, curve_radius_m, speed_limit_mps` and one row per
/// breakpoint, sorted ascending by start position. Throws ArgumentError with
/// the offending line on malformed input.
TrackProfile read_track_profile(const std::string& path);

/// Per-step log, one row per control step. wall_ms is emitted as 0 unless
/// with_timing is set: measured time is not a function of (scenario, seed)
/// and would break byte-identical artifacts.
void write_step_log(std::ostream& out, const ClosedLoopLog& log, bool with_timing);

/// Run summary as key = value lines. beta_bound is written when the caller
/// provides one (runs whose scenario configures moduli).
void write_summary(std::ostream& out, const ClosedLoopLog& log, int k_f, double d_bar,
                   const double* beta_bound);

/// Plot data: position/speed/input against the step index, with the speed
/// limit overlay when the model is a train.
void write_trajectory(std::ostream& out, const ClosedLoopLog& log, const Model& model);

void write_bound_report(std::ostream& out, const BoundReport& report);

} // namespace sbpc
