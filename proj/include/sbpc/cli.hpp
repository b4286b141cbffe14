#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sbpc {

// Exit codes shared by all subcommands:
//   0  success (verify: zero violations)
//   1  I/O or validation failure
//   2  controlled negative outcome (infeasibility abort, bound violations)

/// `run <scenario> -o DIR`: one closed-loop simulation; writes steps.csv,
/// summary.txt and trajectory.csv into DIR.
int cmd_run(const std::string& scenario_path, const std::string& out_dir, std::ostream& out, std::ostream& err);

/// `bound <scenario>`: prints the beta sequence tail, the cumulative bound
/// and the moduli used.
int cmd_bound(const std::string& scenario_path, std::ostream& out, std::ostream& err);

/// `verify <scenario> --runs N --bound-scale S`: Monte Carlo check of the
/// terminal accuracy bound. runs_override <= 0 keeps the scenario's count.
/// bound_scale < 1 weakens the bound on purpose (falsification check).
int cmd_verify(const std::string& scenario_path, int runs_override, double bound_scale, std::ostream& out,
               std::ostream& err);

/// `sweep <scenario> --param P --values v1,v2,...` with P in
/// {omega, d_bar, L}: one run per value; writes sweep.csv into DIR and
/// prints a row per value including the mean solve time.
int cmd_sweep(const std::string& scenario_path, const std::string& param, const std::vector<double>& values,
              const std::string& out_dir, std::ostream& out, std::ostream& err);

} // namespace sbpc
