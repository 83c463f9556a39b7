#include "dispatch/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"Economic dispatch with separable losses: solvers and consensus simulator"};
    app.require_subcommand(1);

    std::string check_path;
    auto* check = app.add_subcommand("check", "Validate an instance and report feasibility");
    check->add_option("instance", check_path, "instance/scenario file")->required();

    std::string solve_path;
    double solve_tol = 1e-9;
    auto* solve = app.add_subcommand("solve", "Solve the relaxed dispatch problem");
    solve->add_option("instance", solve_path, "instance/scenario file")->required();
    solve->add_option("--tol", solve_tol, "balance tolerance on the aggregate gradient");

    std::string sim_path, sim_out;
    bool sim_summary = false;
    auto* simulate = app.add_subcommand("simulate", "Run the distributed consensus scenario");
    simulate->add_option("scenario", sim_path, "scenario file")->required();
    simulate->add_option("--out", sim_out, "trace CSV output path");
    simulate->add_flag("--summary", sim_summary, "print a run summary");

    std::string sweep_path, sweep_param = "T", sweep_dir;
    std::vector<double> sweep_values;
    auto* sweep = app.add_subcommand("sweep", "Re-run a scenario over parameter values");
    sweep->add_option("scenario", sweep_path, "scenario file")->required();
    sweep->add_option("--param", sweep_param, "swept parameter: k or T");
    sweep->add_option("--values", sweep_values, "parameter values")->required();
    sweep->add_option("--out-dir", sweep_dir, "directory for per-run trace CSVs");

    CLI11_PARSE(app, argc, argv);

    if (check->parsed()) return dispatch::cli::cmd_check(check_path, std::cout, std::cerr);
    if (solve->parsed())
        return dispatch::cli::cmd_solve(solve_path, solve_tol, std::cout, std::cerr);
    if (simulate->parsed())
        return dispatch::cli::cmd_simulate(sim_path, sim_out, sim_summary, std::cout, std::cerr);
    if (sweep->parsed())
        return dispatch::cli::cmd_sweep(sweep_path, sweep_param, sweep_values, sweep_dir,
                                        std::cout, std::cerr);
    return dispatch::cli::kExitInvalid;
}
