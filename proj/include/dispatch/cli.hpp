#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dispatch::cli {

/// Exit codes shared by all commands: 0 ok, 1 invalid input, 2 infeasible.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitInfeasible = 2;

/// Validates the instance and prints assumption checks plus feasibility slacks.
int cmd_check(const std::string& path, std::ostream& out, std::ostream& err);

/// Solves the relaxed problem and prints price, dispatch, cost and KKT report.
int cmd_solve(const std::string& path, double tol, std::ostream& out, std::ostream& err);

/// Runs the scenario, optionally writing the trace CSV and a summary block.
int cmd_simulate(const std::string& path, const std::string& out_csv, bool summary,
                 std::ostream& out, std::ostream& err);

/// Re-runs the scenario once per value of `param` ("k" or "T"), concurrently,
/// and prints one summary line per run. Traces land in out_dir when given.
int cmd_sweep(const std::string& path, const std::string& param,
              const std::vector<double>& values, const std::string& out_dir, std::ostream& out,
              std::ostream& err);

}  // namespace dispatch::cli
