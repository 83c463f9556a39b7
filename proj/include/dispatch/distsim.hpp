#pragma once

#include "dispatch/model.hpp"
#include "dispatch/topology.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

namespace dispatch {

struct SimConfig {
    double k = 1.0;
    double T = 0.01;
    /// Per-node sampling overrides. Any entry makes the run asynchronous;
    /// with all entries equal to T the trajectory coincides with the
    /// synchronous one exactly.
    std::map<int, double> T_per_node;
    double horizon = 10.0;
    /// Initial prices; nodes absent from the map start at 0.
    std::map<int, double> initial_lambda;
    /// Record every n-th update instant (t = 0 and the final instant always).
    int record_stride = 1;
    /// Row budget; exceeding it halves the recording density.
    std::size_t max_rows = 1'000'000;
    /// Permit node_leave events that split the communication graph.
    bool allow_disconnect = false;
};

struct DemandStep {
    int node = 0;
    double new_demand = 0.0;
};
struct NodeLeave {
    int node = 0;
};
struct NodeJoin {
    NodeSpec spec;
    std::vector<Topology::Edge> edges;
    /// Price the node restarts with; 0 when absent.
    std::optional<double> initial_lambda;
};
struct CapacityChange {
    int node = 0;
    double new_x_min = 0.0;
    double new_x_max = 0.0;
};

struct ScenarioEvent {
    double at = 0.0;
    std::variant<DemandStep, NodeLeave, NodeJoin, CapacityChange> action;
};

struct TraceRow {
    int node = 0;
    double lambda = 0.0;
    double x_hat = 0.0;
    double grad = 0.0;
};

/// State snapshot at one instant: one row per live node (ascending id) plus
/// the aggregates evaluated on the live fleet and live graph.
struct TraceBlock {
    double t = 0.0;
    std::vector<TraceRow> rows;
    double mismatch = 0.0;
    double total_cost = 0.0;
    double lyapunov = 0.0;
    double disagreement = 0.0;

    [[nodiscard]] double lambda_bar() const;
};

struct Trace {
    std::vector<TraceBlock> blocks;
};

struct SimResult {
    Trace trace;
    Fleet final_fleet;
    Topology final_topology;
    std::map<int, double> final_lambda;
    /// The iteration produced a non-finite price; the trace ends there.
    bool non_finite = false;
};

struct DiagnosticSeries {
    std::vector<double> t;
    std::vector<double> lyapunov;
    std::vector<double> mismatch;
    std::vector<double> total_cost;
    std::vector<double> disagreement;
};

struct DivergenceReport {
    enum class Classification { converged, diverging_up, diverging_down };
    Classification classification = Classification::converged;
    double measured_slope = 0.0;
    /// Analytic rates of the end fleet: d0_up = -upper_slack/N,
    /// d0_down = lower_slack/N. A rate is a candidate only when its sign
    /// indicates the matching infeasibility.
    double d0_up = 0.0;
    double d0_down = 0.0;
    double window = 0.0;
};

/// One forward-difference step; every update reads the pre-step state (Jacobi),
/// so the result is independent of node order. Throws state_error when the
/// state keys do not match the fleet and topology node sets.
[[nodiscard]] std::map<int, double> step_synchronous(const std::map<int, double>& state,
                                                     const Fleet& fleet, const Topology& topo,
                                                     double k, double T);

/// Event-queue state of the asynchronous discretization. `lambda` holds the
/// zero-order-hold prices visible to neighbors; `next_update_ns` the pending
/// per-node deadlines on the shared integer nanosecond clock.
struct AsyncClock {
    std::int64_t now_ns = 0;
    std::map<int, double> lambda;
    std::map<int, std::int64_t> next_update_ns;
};

/// Initial clock: all prices from `config.initial_lambda`, every node due at
/// its own first period.
[[nodiscard]] AsyncClock make_async_clock(const Fleet& fleet, const SimConfig& config);

/// Advances to the earliest pending deadline. Every node due at that instant
/// updates from the pre-batch held values, in ascending id order, and is
/// rescheduled one period later.
[[nodiscard]] AsyncClock step_asynchronous(const AsyncClock& clock, const Fleet& fleet,
                                           const Topology& topo, const SimConfig& config);

/// Full scenario run. Events apply at their timestamps before same-time
/// updates, in file order for ties. node_join starts the new node at the
/// event's initial_lambda (default 0) with its first update one period after
/// joining. The trace records t = 0, every record_stride-th update instant and
/// the final instant.
[[nodiscard]] SimResult run(const Fleet& fleet, const Topology& topo, const SimConfig& config,
                            const std::vector<ScenarioEvent>& events = {});

/// Recomputes the aggregate series from the trace rows against the given fleet
/// and topology. Row node sets must be contained in both.
[[nodiscard]] DiagnosticSeries diagnostics(const Trace& trace, const Fleet& fleet,
                                           const Topology& topo, double k);

/// Least-squares slope of the mean price over the trailing window (20% of the
/// trace span, at least 2 simulated seconds), classified against the analytic
/// divergence rates of `fleet_at_end`. A non-finite slope reports diverging_up.
[[nodiscard]] DivergenceReport detect_divergence(const Trace& trace, const Fleet& fleet_at_end);

}  // namespace dispatch
