#include "dispatch/kernel.hpp"

#include "dispatch/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dispatch {

NodeKernel::NodeKernel(NodeSpec spec, double bisect_tol, int bisect_max_iter)
    : spec_(std::move(spec)), tol_(bisect_tol), max_iter_(bisect_max_iter) {
    analytic_ = spec_.cost.is_quadratic() && spec_.loss.is_quadratic();
    if (!spec_.fixed_output()) {
        // The kernel needs less than the full standing assumptions: v must be
        // defined (phi' < 1) and strictly increasing on the interval.
        if (!(spec_.loss.derivative(spec_.x_min) < 1.0) ||
            !(spec_.loss.derivative(spec_.x_max) < 1.0))
            throw instance_error("node " + std::to_string(spec_.id) +
                                 ": phi' >= 1 on the capacity interval");
        v_lo_ = v(spec_.x_min);
        v_hi_ = v(spec_.x_max);
        if (!std::isfinite(v_lo_) || !std::isfinite(v_hi_) || !(v_lo_ < v_hi_))
            throw instance_error("node " + std::to_string(spec_.id) +
                                 ": v is not strictly increasing on the capacity interval");
    } else {
        v_lo_ = v_hi_ = v(spec_.x_min);
    }
}

double NodeKernel::v(double x) const {
    if (x < spec_.x_min || x > spec_.x_max)
        throw std::domain_error("v: x outside capacity interval of node " +
                                std::to_string(spec_.id));
    return spec_.cost.derivative(x) / (1.0 - spec_.loss.derivative(x));
}

double NodeKernel::v_inverse(double lam) const {
    if (lam < v_lo_ || lam > v_hi_)
        throw std::domain_error("v_inverse: price outside [v(x_min), v(x_max)] of node " +
                                std::to_string(spec_.id));
    if (lam == v_lo_) return spec_.x_min;
    if (lam == v_hi_) return spec_.x_max;

    if (analytic_) {
        // v(x) = (b + 2cx) / (1 - b_phi - 2 c_phi x) = lam solved for x.
        const double b = spec_.cost.b(), c = spec_.cost.c();
        const double bp = spec_.loss.b(), cp = spec_.loss.c();
        const double denom = 2.0 * c + 2.0 * cp * lam;
        if (denom > 0.0) {
            double x = (lam * (1.0 - bp) - b) / denom;
            if (x < spec_.x_min) x = spec_.x_min;
            if (x > spec_.x_max) x = spec_.x_max;
            return x;
        }
        // denom <= 0 only when b < 0 pulls lam negative; bisection still applies.
    }

    double lo = spec_.x_min, hi = spec_.x_max;
    for (int i = 0; i < max_iter_; ++i) {
        double mid = 0.5 * (lo + hi);
        double r = v(mid) - lam;
        if (std::abs(r) <= tol_) return mid;
        if (r < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    throw convergence_error("v_inverse bisection did not reach tolerance on node " +
                            std::to_string(spec_.id));
}

double NodeKernel::x_hat(double lam) const {
    if (spec_.fixed_output()) return spec_.x_min;
    if (lam <= v_lo_) return spec_.x_min;
    if (lam >= v_hi_) return spec_.x_max;
    return v_inverse(lam);
}

double NodeKernel::dual_gradient(double lam) const {
    return spec_.demand - delivered_power(spec_, x_hat(lam));
}

double NodeKernel::dual_value(double lam) const {
    double x = x_hat(lam);
    return spec_.cost.value(x) + lam * (spec_.demand - delivered_power(spec_, x));
}

}  // namespace dispatch
