#pragma once

#include "dispatch/errors.hpp"

#include <functional>
#include <utility>

namespace dispatch {

/// Scalar cost or loss term f(x). Either quadratic a + b·x + c·x² with exact
/// coefficient access, or an opaque eval/derivative pair with a declared domain.
class ScalarFunction {
public:
    static ScalarFunction quadratic(double a, double b, double c) {
        ScalarFunction f;
        f.quad_ = true;
        f.a_ = a;
        f.b_ = b;
        f.c_ = c;
        return f;
    }

    static ScalarFunction generic(std::function<double(double)> eval,
                                  std::function<double(double)> derivative,
                                  double domain_min, double domain_max) {
        ScalarFunction f;
        f.quad_ = false;
        f.eval_ = std::move(eval);
        f.deriv_ = std::move(derivative);
        f.dom_min_ = domain_min;
        f.dom_max_ = domain_max;
        return f;
    }

    [[nodiscard]] double value(double x) const {
        if (quad_) return a_ + x * (b_ + c_ * x);
        return eval_(x);
    }

    /// For quadratic kind this is b + 2·c·x exactly.
    [[nodiscard]] double derivative(double x) const {
        if (quad_) return b_ + 2.0 * c_ * x;
        return deriv_(x);
    }

    [[nodiscard]] bool is_quadratic() const { return quad_; }

    [[nodiscard]] double a() const { return coeff(a_); }
    [[nodiscard]] double b() const { return coeff(b_); }
    [[nodiscard]] double c() const { return coeff(c_); }

    [[nodiscard]] double domain_min() const { return dom_min_; }
    [[nodiscard]] double domain_max() const { return dom_max_; }

private:
    ScalarFunction() = default;

    [[nodiscard]] double coeff(double v) const {
        if (!quad_) throw instance_error("coefficient access on non-quadratic function");
        return v;
    }

    bool quad_ = true;
    double a_ = 0.0, b_ = 0.0, c_ = 0.0;
    std::function<double(double)> eval_;
    std::function<double(double)> deriv_;
    double dom_min_ = 0.0, dom_max_ = 0.0;
};

}  // namespace dispatch
