#include "sbpc/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    CLI::App app{"sbpc - shrinking-horizon move-blocking predictive control simulator"};
    app.require_subcommand(1);

    std::string scenario;
    std::string out_dir = "out";
    int runs_override = 0;
    double bound_scale = 1.0;
    std::string param;
    std::vector<double> values;

    auto* run = app.add_subcommand("run", "simulate one closed-loop run and write its artifacts");
    run->add_option("scenario", scenario, "scenario file")->required();
    run->add_option("-o,--output", out_dir, "output directory (default: out)");

    auto* bound = app.add_subcommand("bound", "print the terminal accuracy bound for the scenario");
    bound->add_option("scenario", scenario, "scenario file")->required();

    auto* verify = app.add_subcommand("verify", "Monte Carlo check of the terminal accuracy bound");
    verify->add_option("scenario", scenario, "scenario file")->required();
    verify->add_option("--runs", runs_override, "override the scenario's Monte Carlo run count");
    verify->add_option("--bound-scale", bound_scale,
                       "scale the bound before checking (debug; <1 exercises the violation detector)");

    auto* sweep = app.add_subcommand("sweep", "re-run the scenario over a parameter grid");
    sweep->add_option("scenario", scenario, "scenario file")->required();
    sweep->add_option("--param", param, "parameter to sweep: omega, d_bar or L")->required();
    sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
    sweep->add_option("-o,--output", out_dir, "output directory (default: out)");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return sbpc::cmd_run(scenario, out_dir, std::cout, std::cerr);
    if (bound->parsed()) return sbpc::cmd_bound(scenario, std::cout, std::cerr);
    if (verify->parsed()) return sbpc::cmd_verify(scenario, runs_override, bound_scale, std::cout, std::cerr);
    if (sweep->parsed()) return sbpc::cmd_sweep(scenario, param, values, out_dir, std::cout, std::cerr);
    return 1;
}
