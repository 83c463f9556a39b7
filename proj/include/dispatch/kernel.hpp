#pragma once

#include "dispatch/model.hpp"

namespace dispatch {

/// Per-node dual-decomposition kernel around the incremental-cost map
/// v(x) = f'(x) / (1 - phi'(x)), which is strictly increasing on the capacity
/// interval under the standing assumptions. Caches v at both endpoints; these
/// are the breakpoints of the clamped primal recovery x_hat.
///
/// Quadratic cost with quadratic loss inverts v in closed form; anything else
/// falls back to monotone bisection. The closed form is exact arithmetic on the
/// coefficients, which keeps repeated simulator evaluations free of tolerance
/// stacking.
class NodeKernel {
public:
    explicit NodeKernel(NodeSpec spec, double bisect_tol = 1e-12, int bisect_max_iter = 200);

    [[nodiscard]] const NodeSpec& spec() const { return spec_; }
    [[nodiscard]] double v_at_xmin() const { return v_lo_; }
    [[nodiscard]] double v_at_xmax() const { return v_hi_; }
    [[nodiscard]] bool analytic_inversion() const { return analytic_; }

    /// v(x) for x inside the capacity interval; throws std::domain_error outside.
    [[nodiscard]] double v(double x) const;

    /// x with v(x) = lam, for lam in [v_at_xmin, v_at_xmax]; throws
    /// std::domain_error outside. Endpoint prices return the endpoint exactly.
    [[nodiscard]] double v_inverse(double lam) const;

    /// Clamped primal recovery, defined for every real lam:
    /// x_min below the lower breakpoint, x_max above the upper one.
    [[nodiscard]] double x_hat(double lam) const;

    /// d g_i^m / d lambda = d - x_hat(lam) + phi(x_hat(lam)). Nonincreasing in lam.
    [[nodiscard]] double dual_gradient(double lam) const;

    /// g_i^m(lam) = f(x_hat) + lam * (d - x_hat + phi(x_hat)). Concave, C1.
    [[nodiscard]] double dual_value(double lam) const;

private:
    NodeSpec spec_;
    double v_lo_ = 0.0;
    double v_hi_ = 0.0;
    bool analytic_ = false;
    double tol_;
    int max_iter_;
};

}  // namespace dispatch
