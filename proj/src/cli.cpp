#include "sbpc/cli.hpp"

#include "sbpc/scenario.hpp"
#include "sbpc/sim_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>

namespace sbpc {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

std::optional<double> scenario_bound(const Scenario& sc)
{
    if (!sc.has_bounds()) return std::nullopt;
    const auto est = resolve_moduli(sc);
    return cumulative_bound(est.moduli, sc.config.disturbance.d_bar, sc.config.k_f);
}

void describe_moduli(std::ostream& out, const ScenarioFile& file, const ModuliEstimate& est)
{
    if (file.moduli_mode == "linear") {
        out << "moduli = linear (supplied): a_x = " << format_double(est.moduli.a_x.linear_gain())
            << ", a_u = " << format_double(est.moduli.a_u.linear_gain()) << "\n";
    } else {
        out << "moduli = linear (estimated from " << file.moduli_samples
            << " samples): a_x = " << format_double(est.moduli.a_x.linear_gain())
            << ", a_u = " << format_double(est.moduli.a_u.linear_gain()) << "\n";
        out << "moduli_note = sampled suprema K_x = " << format_double(est.k_x_raw)
            << ", K_u = " << format_double(est.k_u_raw) << " inflated by " << format_double(est.inflation)
            << "; sampling under-estimates the true constants\n";
    }
}

} // namespace

int cmd_run(const std::string& scenario_path, const std::string& out_dir, std::ostream& out, std::ostream& err)
{
    try {
        const auto sc = load_scenario(scenario_path);
        const auto t0 = std::chrono::steady_clock::now();
        const auto log = run_algorithm(sc.config, sc.algorithm, sc.omega, 0);
        const auto t1 = std::chrono::steady_clock::now();

        fs::create_directories(out_dir);
        std::optional<double> beta;
        if (log.completed()) beta = scenario_bound(sc);
        {
            auto f = open_out(fs::path(out_dir) / "steps.csv");
            write_step_log(f, log, sc.log_timing);
        }
        {
            auto f = open_out(fs::path(out_dir) / "summary.txt");
            write_summary(f, log, sc.config.k_f, sc.config.disturbance.d_bar, beta ? &*beta : nullptr);
        }
        {
            auto f = open_out(fs::path(out_dir) / "trajectory.csv");
            write_trajectory(f, log, *sc.model);
        }

        write_summary(out, log, sc.config.k_f, sc.config.disturbance.d_bar, beta ? &*beta : nullptr);
        out << "runtime_s = "
            << format_double(std::chrono::duration<double>(t1 - t0).count()) << "\n";
        out << "artifacts = " << out_dir << "/{steps.csv, summary.txt, trajectory.csv}\n";
        if (!log.completed()) {
            err << "run aborted: " << log.abort_reason << "\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

int cmd_bound(const std::string& scenario_path, std::ostream& out, std::ostream& err)
{
    try {
        const auto sc = load_scenario(scenario_path);
        const auto est = resolve_moduli(sc);
        const double d_bar = sc.config.disturbance.d_bar;
        const auto beta = beta_sequence(est.moduli, d_bar, sc.config.k_f);

        describe_moduli(out, sc.file, est);
        out << "d_bar = " << format_double(d_bar) << "\n";
        out << "k_f = " << sc.config.k_f << "\n";
        const std::size_t tail = std::min<std::size_t>(5, beta.size());
        out << "beta_tail =";
        for (std::size_t i = beta.size() - tail; i < beta.size(); ++i)
            out << " " << format_double(beta[i]);
        out << "\n";
        out << "beta_total = " << format_double(cumulative_bound(est.moduli, d_bar, sc.config.k_f)) << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

int cmd_verify(const std::string& scenario_path, int runs_override, double bound_scale, std::ostream& out,
               std::ostream& err)
{
    try {
        const auto sc = load_scenario(scenario_path);
        if (sc.algorithm == Algorithm::Nominal) {
            err << "verify requires a relaxed or multiobjective scenario\n";
            return 1;
        }
        const auto est = resolve_moduli(sc);
        const int runs = runs_override > 0 ? runs_override : sc.runs;
        const auto report = verify_bound(sc.config, sc.algorithm, sc.omega, est.moduli, runs, bound_scale);
        describe_moduli(out, sc.file, est);
        write_bound_report(out, report);
        return report.violations == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

int cmd_sweep(const std::string& scenario_path, const std::string& param, const std::vector<double>& values,
              const std::string& out_dir, std::ostream& out, std::ostream& err)
{
    try {
        if (param != "omega" && param != "d_bar" && param != "L") {
            err << "sweep parameter must be one of omega, d_bar, L\n";
            return 1;
        }
        if (values.empty()) {
            err << "sweep needs at least one value\n";
            return 1;
        }
        auto base = parse_scenario(scenario_path);
        const auto base_dir = fs::path(scenario_path).parent_path().string();

        fs::create_directories(out_dir);
        auto table = open_out(fs::path(out_dir) / "sweep.csv");
        table << "value, terminal_delta, total_cost, nodes_total\n";
        out << "param = " << param << "\n";

        bool any_aborted = false;
        for (double v : values) {
            auto file = base;
            if (param == "omega") {
                if (file.algorithm != "multiobjective") {
                    err << "omega sweep requires a multiobjective scenario\n";
                    return 1;
                }
                file.omega = v;
            } else if (param == "d_bar") {
                file.d_bar = v;
            } else {
                if (v < 1 || v != std::floor(v)) {
                    err << "L sweep values must be positive integers\n";
                    return 1;
                }
                file.L = static_cast<int>(v);
            }
            const auto sc = build_scenario(std::move(file), base_dir.empty() ? "." : base_dir);
            const auto log = run_algorithm(sc.config, sc.algorithm, sc.omega, 0);

            std::int64_t nodes = 0;
            double ms = 0;
            for (const auto& s : log.steps) {
                nodes += s.nodes;
                ms += s.wall_ms;
            }
            const double mean_ms = log.steps.empty() ? 0.0 : ms / static_cast<double>(log.steps.size());

            if (log.completed()) {
                table << format_double(v) << ", " << format_double(log.terminal_delta) << ", "
                      << format_double(log.total_cost) << ", " << nodes << "\n";
                out << param << " = " << format_double(v) << ": terminal_delta = "
                    << format_double(log.terminal_delta) << ", total_cost = " << format_double(log.total_cost)
                    << ", nodes = " << nodes << ", mean_solve_ms = " << format_double(mean_ms) << "\n";
            } else {
                any_aborted = true;
                table << format_double(v) << ", nan, nan, " << nodes << "\n";
                out << param << " = " << format_double(v) << ": aborted (" << log.abort_reason << ")\n";
            }
        }
        out << "table = " << out_dir << "/sweep.csv\n";
        return any_aborted ? 2 : 0;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

} // namespace sbpc
