#pragma once

#include "dispatch/kernel.hpp"
#include "dispatch/model.hpp"
#include "dispatch/topology.hpp"

#include <utility>
#include <vector>

namespace dispatch {

/// Optimal price and primal recovery of the relaxed problem.
struct DualSolution {
    double lambda_star = 0.0;
    std::vector<double> x_star;  // fleet order
    double mismatch = 0.0;       // sum(d) - sum(p(x_star)) at lambda_star
    double cost = 0.0;
};

/// Advisory high-gain threshold k_bar = 2M / (sigma2 * delta2). The moduli
/// delta1/delta2 are estimated by sampling, so k_bar is a guide, not a bound.
struct GainEstimate {
    double M = 0.0;
    double sigma2 = 0.0;
    double delta2 = 0.0;
    double k_bar = 0.0;
};

struct KktReport {
    bool primal_feasible = false;
    bool multiplier_nonnegative = false;
    bool relaxed_constraint = false;
    bool complementary_slackness = false;
    bool minimizer_condition = false;

    double worst_box_violation = 0.0;
    double constraint_residual = 0.0;        // sum(d - x + phi(x)), signed
    double complementarity_residual = 0.0;   // |lam * constraint_residual|
    double worst_minimizer_deviation = 0.0;  // max_i |x_i - x_hat_i(lam)|

    [[nodiscard]] bool all_pass() const {
        return primal_feasible && multiplier_nonnegative && relaxed_constraint &&
               complementary_slackness && minimizer_condition;
    }
};

/// Root of the aggregate dual gradient by bisection over
/// [min_i v_i(x_min) - 1, max_i v_i(x_max) + 1]. The gradient is nonincreasing
/// and constant-signed outside that bracket. Zero lower slack is canonicalized
/// to lambda_star = 0. Throws infeasibility_error when the balance cannot be met.
[[nodiscard]] DualSolution solve_dual_bisection(const Fleet& fleet, double tol);

/// Explicit Euler integration of the centralized ascent
/// lambda_dot = sum_i dg_i^m(lambda). Returns the (time, price) trajectory
/// including t = 0. Infeasible instances produce divergent trajectories.
[[nodiscard]] std::vector<std::pair<double, double>> solve_dual_ode(const Fleet& fleet,
                                                                    double lambda0,
                                                                    double step,
                                                                    double horizon);

/// Checks the optimality conditions of the relaxed problem at (x, lam):
/// box feasibility, lam >= 0, relaxed balance, complementary slackness and the
/// per-node minimizer condition x_i = x_hat_i(lam). Each reported separately.
[[nodiscard]] KktReport verify_kkt(const Fleet& fleet, const std::vector<double>& x, double lam,
                                   double tol);

/// Sufficient consensus gain for accuracy epsilon. M is exact (the per-node
/// gradient range is attained at the capacity endpoints); the moduli are
/// sampled on 1025-point grids.
[[nodiscard]] GainEstimate estimate_gain(const Fleet& fleet, const Topology& topo,
                                         double epsilon);

}  // namespace dispatch
