#include "dispatch/oracle.hpp"

#include "dispatch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dispatch {

namespace {

double sup_one_minus_phi_slope(const NodeSpec& n) {
    if (n.loss.is_quadratic())
        return std::max(std::abs(1.0 - n.loss.derivative(n.x_min)),
                        std::abs(1.0 - n.loss.derivative(n.x_max)));
    double worst = 0.0;
    constexpr int samples = 257;
    for (int i = 0; i <= samples; ++i) {
        double x = n.x_min + (n.x_max - n.x_min) * static_cast<double>(i) / samples;
        worst = std::max(worst, std::abs(1.0 - n.loss.derivative(x)));
    }
    return worst;
}

std::vector<double> axis_points(const NodeSpec& n, double resolution) {
    std::vector<double> xs;
    double span = n.x_max - n.x_min;
    auto steps = static_cast<long long>(std::floor(span / resolution + 1e-9));
    xs.reserve(static_cast<std::size_t>(steps) + 2);
    for (long long m = 0; m <= steps; ++m)
        xs.push_back(n.x_min + resolution * static_cast<double>(m));
    if (xs.back() < n.x_max) xs.push_back(n.x_max);
    return xs;
}

}  // namespace

double default_band(const Fleet& fleet, double resolution) {
    double sup = 0.0;
    for (const auto& n : fleet.nodes()) sup = std::max(sup, sup_one_minus_phi_slope(n));
    return 2.0 * static_cast<double>(fleet.size()) * resolution * std::max(1.0, sup);
}

GridSolution grid_search(const Fleet& fleet, double resolution) {
    return grid_search(fleet, resolution, default_band(fleet, resolution));
}

GridSolution grid_search(const Fleet& fleet, double resolution, double band) {
    constexpr std::size_t point_cap = 10'000'000;
    if (fleet.empty()) throw instance_error("grid search on empty fleet");
    if (fleet.size() > 3) throw instance_error("grid search capped at 3 nodes");
    if (!(resolution > 0.0)) throw instance_error("resolution must be positive");

    double total_demand = 0.0;
    for (const auto& n : fleet.nodes()) total_demand += n.demand;

    // Per-axis precomputation keeps the inner loop to a few additions.
    std::vector<std::vector<double>> xs, ps, cs;
    std::size_t points = 1;
    for (const auto& n : fleet.nodes()) {
        auto axis = axis_points(n, resolution);
        if (points > point_cap / axis.size())
            throw instance_error("grid exceeds the 1e7 point cap at this resolution");
        points *= axis.size();
        std::vector<double> p, c;
        p.reserve(axis.size());
        c.reserve(axis.size());
        for (double x : axis) {
            p.push_back(delivered_power(n, x));
            c.push_back(n.cost.value(x));
        }
        xs.push_back(std::move(axis));
        ps.push_back(std::move(p));
        cs.push_back(std::move(c));
    }

    const std::size_t dims = xs.size();
    std::vector<std::size_t> idx(dims, 0);
    bool found = false;
    double best_cost = 0.0, best_residual = 0.0;
    std::vector<std::size_t> best_idx;

    while (true) {
        double supply = 0.0, cost = 0.0;
        for (std::size_t d = 0; d < dims; ++d) {
            supply += ps[d][idx[d]];
            cost += cs[d][idx[d]];
        }
        double residual = std::abs(supply - total_demand);
        if (residual <= band && (!found || cost < best_cost)) {
            found = true;
            best_cost = cost;
            best_residual = residual;
            best_idx = idx;
        }
        std::size_t d = 0;
        for (; d < dims; ++d) {
            if (++idx[d] < xs[d].size()) break;
            idx[d] = 0;
        }
        if (d == dims) break;
    }

    if (!found)
        throw oracle_infeasible("no grid point within band " + std::to_string(band) +
                                " at resolution " + std::to_string(resolution));

    GridSolution sol;
    sol.cost = best_cost;
    sol.residual = best_residual;
    sol.resolution = resolution;
    for (std::size_t d = 0; d < dims; ++d) sol.x_grid.push_back(xs[d][best_idx[d]]);
    return sol;
}

double finite_difference(const std::function<double(double)>& fn, double at, double h) {
    if (!(h > 0.0)) throw instance_error("finite difference step must be positive");
    double hi = fn(at + h);
    double lo = fn(at - h);
    if (!std::isfinite(hi) || !std::isfinite(lo))
        throw numeric_error("non-finite evaluation in finite difference");
    return (hi - lo) / (2.0 * h);
}

}  // namespace dispatch
