#include "dispatch/model.hpp"

#include "dispatch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace dispatch {

double delivered_power(const NodeSpec& n, double x) {
    return x - n.loss.value(x);
}

Fleet::Fleet(std::vector<NodeSpec> nodes) : nodes_(std::move(nodes)) {
    std::set<int> seen;
    for (const auto& n : nodes_) {
        if (!seen.insert(n.id).second)
            throw instance_error("duplicate node id " + std::to_string(n.id));
        if (!(n.x_min <= n.x_max))
            throw instance_error("node " + std::to_string(n.id) + ": x_min > x_max");
        if (!std::isfinite(n.x_min) || !std::isfinite(n.x_max) || !std::isfinite(n.demand))
            throw instance_error("node " + std::to_string(n.id) + ": non-finite field");
        for (double x : {n.x_min, n.x_max}) {
            if (!std::isfinite(n.cost.value(x)) || !std::isfinite(n.loss.value(x)))
                throw instance_error("node " + std::to_string(n.id) +
                                     ": cost/loss not finite on capacity interval");
        }
    }
}

bool Fleet::has_node(int id) const {
    return std::any_of(nodes_.begin(), nodes_.end(),
                       [id](const NodeSpec& n) { return n.id == id; });
}

const NodeSpec& Fleet::node(int id) const {
    for (const auto& n : nodes_)
        if (n.id == id) return n;
    throw instance_error("unknown node id " + std::to_string(id));
}

Fleet Fleet::with_demand(int id, double new_demand) const {
    auto copy = nodes_;
    for (auto& n : copy)
        if (n.id == id) {
            n.demand = new_demand;
            return Fleet(std::move(copy));
        }
    throw instance_error("unknown node id " + std::to_string(id));
}

Fleet Fleet::with_capacity(int id, double new_xmin, double new_xmax) const {
    auto copy = nodes_;
    for (auto& n : copy)
        if (n.id == id) {
            n.x_min = new_xmin;
            n.x_max = new_xmax;
            return Fleet(std::move(copy));
        }
    throw instance_error("unknown node id " + std::to_string(id));
}

Fleet Fleet::without_node(int id) const {
    auto copy = nodes_;
    auto it = std::remove_if(copy.begin(), copy.end(),
                             [id](const NodeSpec& n) { return n.id == id; });
    if (it == copy.end()) throw instance_error("unknown node id " + std::to_string(id));
    copy.erase(it, copy.end());
    return Fleet(std::move(copy));
}

Fleet Fleet::with_node(const NodeSpec& spec) const {
    auto copy = nodes_;
    copy.push_back(spec);
    return Fleet(std::move(copy));
}

namespace {

// Derivative samples on [lo, hi]: endpoints plus `count` evenly spaced points.
std::vector<double> derivative_samples(const ScalarFunction& f, double lo, double hi, int count) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count) + 2);
    out.push_back(f.derivative(lo));
    for (int i = 1; i <= count; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count + 1);
        out.push_back(f.derivative(x));
    }
    out.push_back(f.derivative(hi));
    return out;
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

NodeValidation validate_node_assumptions(const NodeSpec& n, int samples) {
    NodeValidation r;
    r.id = n.id;
    if (n.fixed_output()) {
        // Degenerate interval: no slope condition can bind.
        r.f_strictly_convex = r.phi_convex = r.phi_slope_below_one = r.f_slope_positive = true;
        return r;
    }

    if (n.cost.is_quadratic()) {
        r.f_strictly_convex = n.cost.c() > 0.0;
        // f' is affine, so its minimum over the interval sits at an endpoint.
        r.f_slope_positive =
            std::min(n.cost.derivative(n.x_min), n.cost.derivative(n.x_max)) > 0.0;
    } else {
        auto d = derivative_samples(n.cost, n.x_min, n.x_max, samples);
        r.f_strictly_convex = all_finite(d);
        r.f_slope_positive = all_finite(d);
        for (std::size_t i = 0; i + 1 < d.size(); ++i)
            if (!(d[i + 1] > d[i])) r.f_strictly_convex = false;
        for (double s : d)
            if (!(s > 0.0)) r.f_slope_positive = false;
    }

    if (n.loss.is_quadratic()) {
        r.phi_convex = n.loss.c() >= 0.0;
        r.phi_slope_below_one =
            std::max(n.loss.derivative(n.x_min), n.loss.derivative(n.x_max)) < 1.0;
    } else {
        auto d = derivative_samples(n.loss, n.x_min, n.x_max, samples);
        r.phi_convex = all_finite(d);
        r.phi_slope_below_one = all_finite(d);
        for (std::size_t i = 0; i + 1 < d.size(); ++i)
            if (!(d[i + 1] >= d[i])) r.phi_convex = false;
        for (double s : d)
            if (!(s < 1.0)) r.phi_slope_below_one = false;
    }
    return r;
}

ValidationReport validate_assumptions(const Fleet& fleet, int samples_per_node) {
    if (fleet.empty()) throw instance_error("empty fleet");
    ValidationReport report;
    report.nodes.reserve(fleet.size());
    for (const auto& n : fleet.nodes())
        report.nodes.push_back(validate_node_assumptions(n, samples_per_node));
    return report;
}

void require_assumptions(const Fleet& fleet) {
    auto report = validate_assumptions(fleet);
    for (const auto& n : report.nodes) {
        if (n.pass()) continue;
        std::string what = "node " + std::to_string(n.id) + " violates standing assumptions:";
        if (!n.f_strictly_convex) what += " f not strictly convex;";
        if (!n.phi_convex) what += " phi not convex;";
        if (!n.phi_slope_below_one) what += " phi' >= 1 on capacity interval;";
        if (!n.f_slope_positive) what += " f' <= 0 on capacity interval;";
        throw instance_error(what);
    }
}

FeasibilityMargin feasibility_margin(const Fleet& fleet) {
    double total_demand = 0.0;
    double min_supply = 0.0;
    double max_supply = 0.0;
    for (const auto& n : fleet.nodes()) {
        total_demand += n.demand;
        min_supply += delivered_power(n, n.x_min);
        max_supply += delivered_power(n, n.x_max);
    }
    return {total_demand - min_supply, max_supply - total_demand};
}

std::vector<double> construct_feasible_point(const Fleet& fleet, double tol) {
    auto margin = feasibility_margin(fleet);
    if (!margin.feasible())
        throw infeasibility_error("instance infeasible: lower slack " +
                                      std::to_string(margin.lower_slack) + ", upper slack " +
                                      std::to_string(margin.upper_slack),
                                  margin.lower_slack, margin.upper_slack);

    auto point_at = [&](double c) {
        std::vector<double> x;
        x.reserve(fleet.size());
        for (const auto& n : fleet.nodes()) x.push_back(n.x_min + c * (n.x_max - n.x_min));
        return x;
    };
    auto residual = [&](const std::vector<double>& x) {
        double r = 0.0;
        std::size_t i = 0;
        for (const auto& n : fleet.nodes()) r += delivered_power(n, x[i++]) - n.demand;
        return r;
    };

    // residual is strictly increasing in c; residual(0) = -lower_slack <= 0,
    // residual(1) = upper_slack >= 0.
    double lo = 0.0, hi = 1.0;
    auto x_lo = point_at(lo);
    if (std::abs(residual(x_lo)) <= tol) return x_lo;
    auto x_hi = point_at(hi);
    if (std::abs(residual(x_hi)) <= tol) return x_hi;

    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        auto x = point_at(mid);
        double r = residual(x);
        if (std::abs(r) <= tol) return x;
        if (r < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    throw convergence_error("feasible point bisection did not reach tolerance");
}

}  // namespace dispatch
