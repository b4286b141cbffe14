#include "sbpc/sim_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

namespace sbpc {

std::string format_double(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

} // namespace

TrackProfile read_track_profile(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ArgumentError("track profile: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ArgumentError("track profile: '" + path + "' is empty");
    const auto header = split_csv(line);
    const std::vector<std::string> expected = {"start_pos_m", "slope_rad", "curve_radius_m", "speed_limit_mps"};
    if (header != expected)
        throw ArgumentError("track profile: header must be 'start_pos_m, slope_rad, curve_radius_m, speed_limit_mps'");

    std::vector<TrackSegment> segments;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 4)
            throw ArgumentError("track profile: line " + std::to_string(lineno) + " has "
                                + std::to_string(cells.size()) + " columns, expected 4");
        TrackSegment seg;
        try {
            seg.start_pos = std::stod(cells[0]);
            seg.slope = std::stod(cells[1]);
            seg.curve_radius = std::stod(cells[2]);
            seg.speed_limit = std::stod(cells[3]);
        } catch (const std::exception&) {
            throw ArgumentError("track profile: line " + std::to_string(lineno) + " is not numeric");
        }
        segments.push_back(seg);
    }
    try {
        return TrackProfile(std::move(segments));
    } catch (const ArgumentError& e) {
        throw ArgumentError(std::string("track profile '") + path + "': " + e.what());
    }
}

void write_step_log(std::ostream& out, const ClosedLoopLog& log, bool with_timing)
{
    out << "k, x1, x2, u_cmd, u_applied, d, gamma_lb, solve_cost, nodes, wall_ms\n";
    for (const auto& s : log.steps) {
        out << s.k << ", " << format_double(s.x(0)) << ", " << format_double(s.x(1)) << ", "
            << format_double(s.u_cmd(0)) << ", " << format_double(s.u_applied(0)) << ", "
            << format_double(s.d(0)) << ", " << format_double(s.gamma_lb) << ", "
            << format_double(s.solve_cost) << ", " << s.nodes << ", "
            << format_double(with_timing ? s.wall_ms : 0.0) << "\n";
    }
}

void write_summary(std::ostream& out, const ClosedLoopLog& log, int k_f, double d_bar, const double* beta_bound)
{
    const char* status = log.status == RunStatus::Completed ? "completed"
        : log.status == RunStatus::InfeasibleAtStart        ? "infeasible_at_start"
                                                            : "aborted";
    out << "status = " << status << "\n";
    out << "steps_total = " << k_f << "\n";
    out << "feasible_steps = " << log.feasible_steps << "\n";
    out << "d_bar = " << format_double(d_bar) << "\n";
    if (log.completed()) {
        out << "terminal_delta = " << format_double(log.terminal_delta) << "\n";
        out << "total_cost = " << format_double(log.total_cost) << "\n";
    } else {
        out << "abort_step = " << log.abort_step << "\n";
        out << "abort_reason = " << log.abort_reason << "\n";
    }
    if (beta_bound != nullptr) out << "beta_bound = " << format_double(*beta_bound) << "\n";
}

void write_trajectory(std::ostream& out, const ClosedLoopLog& log, const Model& model)
{
    const auto* train = dynamic_cast<const TrainModel*>(&model);
    out << "k, x1, x2, u_cmd";
    if (train != nullptr) out << ", speed_limit";
    out << "\n";
    for (std::size_t k = 0; k < log.states.size(); ++k) {
        const State& x = log.states[k];
        out << k << ", " << format_double(x(0)) << ", " << format_double(x(1)) << ", ";
        if (k < log.steps.size()) out << format_double(log.steps[k].u_cmd(0));
        if (train != nullptr) out << ", " << format_double(train->profile().speed_limit(x(0)));
        out << "\n";
    }
}

void write_bound_report(std::ostream& out, const BoundReport& report)
{
    out << "d_bar = " << format_double(report.d_bar) << "\n";
    out << "k_f = " << report.k_f << "\n";
    out << "beta_total = " << format_double(report.beta_total) << "\n";
    out << "max_delta_observed = " << format_double(report.max_delta_observed) << "\n";
    out << "violations = " << report.violations << "\n";
    out << "runs = " << report.runs << "\n";
    out << "margin = " << format_double(report.margin) << "\n";
    if (report.bound_scale != 1.0) out << "bound_scale = " << format_double(report.bound_scale) << "\n";
}

} // namespace sbpc
