#include "dispatch/central.hpp"

#include "dispatch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dispatch {

namespace {

std::vector<NodeKernel> make_kernels(const Fleet& fleet) {
    std::vector<NodeKernel> ks;
    ks.reserve(fleet.size());
    for (const auto& n : fleet.nodes()) ks.emplace_back(n);
    return ks;
}

double aggregate_gradient(const std::vector<NodeKernel>& ks, double lam) {
    double g = 0.0;
    for (const auto& k : ks) g += k.dual_gradient(lam);
    return g;
}

DualSolution solution_at(const std::vector<NodeKernel>& ks, double lam) {
    DualSolution s;
    s.lambda_star = lam;
    s.x_star.reserve(ks.size());
    for (const auto& k : ks) {
        double x = k.x_hat(lam);
        s.x_star.push_back(x);
        s.mismatch += k.spec().demand - delivered_power(k.spec(), x);
        s.cost += k.spec().cost.value(x);
    }
    return s;
}

}  // namespace

DualSolution solve_dual_bisection(const Fleet& fleet, double tol) {
    auto margin = feasibility_margin(fleet);
    if (!margin.feasible())
        throw infeasibility_error("no price balances supply and demand: lower slack " +
                                      std::to_string(margin.lower_slack) + ", upper slack " +
                                      std::to_string(margin.upper_slack),
                                  margin.lower_slack, margin.upper_slack);

    auto ks = make_kernels(fleet);

    // Feasible instances have aggregate gradient lower_slack >= 0 at lambda = 0;
    // zero slack means the minimum-output point already balances.
    if (margin.lower_slack <= 0.0) return solution_at(ks, 0.0);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& k : ks) {
        if (k.spec().fixed_output()) continue;
        lo = std::min(lo, k.v_at_xmin());
        hi = std::max(hi, k.v_at_xmax());
    }
    if (!std::isfinite(lo)) return solution_at(ks, 0.0);  // every node fixed
    lo -= 1.0;
    hi += 1.0;

    for (int iter = 0; iter < 300; ++iter) {
        double mid = 0.5 * (lo + hi);
        double g = aggregate_gradient(ks, mid);
        if (std::abs(g) <= tol) return solution_at(ks, std::max(mid, 0.0));
        if (g > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    throw convergence_error("dual bisection did not reach tolerance");
}

std::vector<std::pair<double, double>> solve_dual_ode(const Fleet& fleet, double lambda0,
                                                      double step, double horizon) {
    if (step <= 0.0) throw instance_error("ODE step must be positive");
    auto ks = make_kernels(fleet);

    std::vector<std::pair<double, double>> traj;
    auto n_steps = static_cast<long long>(std::llround(horizon / step));
    traj.reserve(static_cast<std::size_t>(n_steps) + 1);
    double lam = lambda0;
    traj.emplace_back(0.0, lam);
    for (long long i = 1; i <= n_steps; ++i) {
        lam += step * aggregate_gradient(ks, lam);
        traj.emplace_back(static_cast<double>(i) * step, lam);
    }
    return traj;
}

KktReport verify_kkt(const Fleet& fleet, const std::vector<double>& x, double lam, double tol) {
    if (x.size() != fleet.size()) throw instance_error("x dimension does not match fleet");
    auto ks = make_kernels(fleet);

    KktReport r;
    double residual = 0.0;
    std::size_t i = 0;
    for (const auto& k : ks) {
        const auto& n = k.spec();
        double box = std::max(n.x_min - x[i], x[i] - n.x_max);
        r.worst_box_violation = std::max(r.worst_box_violation, box);
        r.worst_minimizer_deviation =
            std::max(r.worst_minimizer_deviation, std::abs(x[i] - k.x_hat(lam)));
        residual += n.demand - delivered_power(n, x[i]);
        ++i;
    }
    r.constraint_residual = residual;
    r.complementarity_residual = std::abs(lam * residual);

    r.primal_feasible = r.worst_box_violation <= tol;
    r.multiplier_nonnegative = lam >= -tol;
    r.relaxed_constraint = residual <= tol;
    r.complementary_slackness = r.complementarity_residual <= tol;
    r.minimizer_condition = r.worst_minimizer_deviation <= tol;
    return r;
}

GainEstimate estimate_gain(const Fleet& fleet, const Topology& topo, double epsilon) {
    if (epsilon <= 0.0) throw instance_error("epsilon must be positive");
    if (!topo.is_connected()) throw instance_error("gain estimate requires a connected topology");
    auto margin = feasibility_margin(fleet);
    if (!margin.feasible())
        throw infeasibility_error("gain estimate requires a feasible instance",
                                  margin.lower_slack, margin.upper_slack);

    auto ks = make_kernels(fleet);
    const auto N = static_cast<double>(fleet.size());
    constexpr int grid = 1025;

    GainEstimate est;
    est.sigma2 = topo.sigma2();

    double m2 = 0.0;
    for (const auto& n : fleet.nodes()) {
        double g_lo = n.demand - delivered_power(n, n.x_min);
        double g_hi = n.demand - delivered_power(n, n.x_max);
        double m = std::max(std::abs(g_lo), std::abs(g_hi));
        m2 += m * m;
    }
    est.M = std::sqrt(m2);

    // delta1: a p-increment small enough to pin the argument within epsilon,
    // uniformly over nodes. For spans <= epsilon the full p-range works.
    double delta1 = std::numeric_limits<double>::infinity();
    for (const auto& n : fleet.nodes()) {
        double span = n.x_max - n.x_min;
        if (span == 0.0) continue;
        double d1;
        if (span <= epsilon) {
            d1 = delivered_power(n, n.x_max) - delivered_power(n, n.x_min);
        } else {
            d1 = std::numeric_limits<double>::infinity();
            for (int i = 0; i < grid; ++i) {
                double x = n.x_min + (span - epsilon) * static_cast<double>(i) / (grid - 1);
                d1 = std::min(d1, delivered_power(n, x + epsilon) - delivered_power(n, x));
            }
        }
        delta1 = std::min(delta1, d1);
    }
    if (!std::isfinite(delta1)) delta1 = 1.0;  // all nodes fixed, gradient constant

    // delta2 from the steepest sampled slope of any node's dual gradient.
    double steepest = 0.0;
    for (const auto& k : ks) {
        double lo = k.v_at_xmin(), hi = k.v_at_xmax();
        if (!(hi > lo)) continue;
        double prev = k.dual_gradient(lo);
        for (int i = 1; i < grid; ++i) {
            double lam = lo + (hi - lo) * static_cast<double>(i) / (grid - 1);
            double g = k.dual_gradient(lam);
            steepest = std::max(steepest, std::abs(g - prev) / ((hi - lo) / (grid - 1)));
            prev = g;
        }
    }
    est.delta2 = steepest > 0.0 ? (delta1 / (3.0 * N)) / steepest : 1.0;

    est.k_bar = 2.0 * est.M / (est.sigma2 * est.delta2);
    return est;
}

}  // namespace dispatch
