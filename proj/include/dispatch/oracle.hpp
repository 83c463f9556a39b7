#pragma once

#include "dispatch/model.hpp"

#include <functional>
#include <vector>

namespace dispatch {

/// Cheapest grid point inside the feasibility band |sum(p(x)) - sum(d)| <= band.
struct GridSolution {
    std::vector<double> x_grid;  // fleet order
    double cost = 0.0;
    double residual = 0.0;  // |sum(p(x_grid)) - sum(d)|
    double resolution = 0.0;
};

/// Band wide enough that the continuous balance manifold always meets the
/// grid: 2 * N * resolution * max(1, sup|1 - phi'|).
[[nodiscard]] double default_band(const Fleet& fleet, double resolution);

/// Exhaustive enumeration of the capacity box at the given resolution,
/// keeping points within the band and returning the minimum-cost survivor.
/// Intentionally naive; capped at 3 nodes and 1e7 grid points. Throws
/// oracle_infeasible when nothing survives (which on a feasible instance
/// means the band was too tight for the resolution).
[[nodiscard]] GridSolution grid_search(const Fleet& fleet, double resolution, double band);
[[nodiscard]] GridSolution grid_search(const Fleet& fleet, double resolution);

/// Centered difference (fn(at+h) - fn(at-h)) / (2h). Throws numeric_error on
/// a non-finite evaluation.
[[nodiscard]] double finite_difference(const std::function<double(double)>& fn, double at,
                                       double h);

}  // namespace dispatch
