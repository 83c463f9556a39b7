#pragma once

#include "dispatch/scalar_function.hpp"

#include <vector>

namespace dispatch {

/// One bus: cost f, separable loss phi, capacity interval [x_min, x_max], local demand.
struct NodeSpec {
    int id = 0;
    ScalarFunction cost = ScalarFunction::quadratic(0.0, 0.0, 0.0);
    ScalarFunction loss = ScalarFunction::quadratic(0.0, 0.0, 0.0);
    double x_min = 0.0;
    double x_max = 0.0;
    double demand = 0.0;

    /// x_min == x_max: the node cannot move its generation.
    [[nodiscard]] bool fixed_output() const { return x_min == x_max; }
};

/// Net power a node delivers to the balance at generation level x: p(x) = x - phi(x).
[[nodiscard]] double delivered_power(const NodeSpec& n, double x);

/// Immutable, id-unique collection of nodes. Construction checks structure only
/// (ids, interval ordering, finite data); the standing convexity assumptions are
/// checked separately so that violating instances can still be loaded and reported.
class Fleet {
public:
    Fleet() = default;
    explicit Fleet(std::vector<NodeSpec> nodes);

    [[nodiscard]] const std::vector<NodeSpec>& nodes() const { return nodes_; }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] bool empty() const { return nodes_.empty(); }

    [[nodiscard]] bool has_node(int id) const;
    [[nodiscard]] const NodeSpec& node(int id) const;

    /// Copies with one field changed; used by scenario events.
    [[nodiscard]] Fleet with_demand(int id, double new_demand) const;
    [[nodiscard]] Fleet with_capacity(int id, double new_xmin, double new_xmax) const;
    [[nodiscard]] Fleet without_node(int id) const;
    [[nodiscard]] Fleet with_node(const NodeSpec& spec) const;

private:
    std::vector<NodeSpec> nodes_;
};

struct NodeValidation {
    int id = 0;
    bool f_strictly_convex = false;
    bool phi_convex = false;
    bool phi_slope_below_one = false;
    bool f_slope_positive = false;

    [[nodiscard]] bool pass() const {
        return f_strictly_convex && phi_convex && phi_slope_below_one && f_slope_positive;
    }
};

struct ValidationReport {
    std::vector<NodeValidation> nodes;

    [[nodiscard]] bool all_pass() const {
        for (const auto& n : nodes)
            if (!n.pass()) return false;
        return true;
    }
};

struct FeasibilityMargin {
    double lower_slack = 0.0;
    double upper_slack = 0.0;

    /// Closed-interval convention: zero slack counts as feasible.
    [[nodiscard]] bool feasible() const { return lower_slack >= 0.0 && upper_slack >= 0.0; }
};

/// Checks one node against the standing assumptions: f strictly convex, phi
/// convex, phi' < 1 and f' > 0 on the capacity interval. Quadratic parts are
/// checked by exact coefficient inequalities, generic parts by sampling the
/// derivative at `samples` evenly spaced points plus both endpoints.
/// Fixed-output nodes pass vacuously.
[[nodiscard]] NodeValidation validate_node_assumptions(const NodeSpec& node, int samples = 257);

/// validate_node_assumptions over the whole fleet.
[[nodiscard]] ValidationReport validate_assumptions(const Fleet& fleet, int samples_per_node = 257);

/// Throws instance_error naming the first violating node.
void require_assumptions(const Fleet& fleet);

/// lower_slack = sum(d) - sum(p(x_min)); upper_slack = sum(p(x_max)) - sum(d).
/// The instance is feasible iff both are >= 0.
[[nodiscard]] FeasibilityMargin feasibility_margin(const Fleet& fleet);

/// A point on the segment x_min + c*(x_max - x_min) with |sum(p(x)) - sum(d)| <= tol,
/// found by bisection on c. The residual is strictly increasing in c.
[[nodiscard]] std::vector<double> construct_feasible_point(const Fleet& fleet, double tol);

}  // namespace dispatch
