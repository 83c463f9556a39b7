#include "dispatch/distsim.hpp"

#include "dispatch/errors.hpp"
#include "dispatch/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace dispatch {

namespace {

std::int64_t to_ns(double seconds) { return std::llround(seconds * 1e9); }
double to_seconds(std::int64_t ns) { return static_cast<double>(ns) / 1e9; }

/// The one forward-difference update both discretizations share. Neighbor
/// prices come from the pre-step (held) map; iteration order is the sorted
/// neighbor list, so identical inputs give bit-identical results.
double next_lambda(double lam_i, const NodeKernel& kern, const std::vector<int>& neighbors,
                   const std::map<int, double>& held, double k, double T_i) {
    double consensus = 0.0;
    for (int j : neighbors) consensus += held.at(j) - lam_i;
    return lam_i + T_i * (kern.dual_gradient(lam_i) + k * consensus);
}

void require_matching_sets(const std::map<int, double>& state, const Fleet& fleet,
                           const Topology& topo) {
    std::set<int> st;
    for (const auto& [id, lam] : state) st.insert(id);
    std::set<int> fl;
    for (const auto& n : fleet.nodes()) fl.insert(n.id);
    std::set<int> tp(topo.node_ids().begin(), topo.node_ids().end());
    if (st != fl || st != tp)
        throw state_error("state, fleet and topology node sets do not match");
}

double sampling_time(const SimConfig& config, int id) {
    auto it = config.T_per_node.find(id);
    return it == config.T_per_node.end() ? config.T : it->second;
}

void validate_config(const SimConfig& config) {
    if (!(config.k > 0.0)) throw instance_error("coupling gain must be positive");
    if (!(config.T > 0.0)) throw instance_error("sampling time must be positive");
    if (!(config.horizon > 0.0)) throw instance_error("horizon must be positive");
    for (const auto& [id, t] : config.T_per_node)
        if (!(t > 0.0))
            throw instance_error("sampling time of node " + std::to_string(id) +
                                 " must be positive");
    if (config.record_stride < 1) throw instance_error("record stride must be >= 1");
}

}  // namespace

double TraceBlock::lambda_bar() const {
    double s = 0.0;
    for (const auto& r : rows) s += r.lambda;
    return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

std::map<int, double> step_synchronous(const std::map<int, double>& state, const Fleet& fleet,
                                       const Topology& topo, double k, double T) {
    require_matching_sets(state, fleet, topo);
    std::map<int, double> out;
    for (const auto& [id, lam] : state) {
        NodeKernel kern(fleet.node(id));
        out[id] = next_lambda(lam, kern, topo.neighbors(id), state, k, T);
    }
    return out;
}

AsyncClock make_async_clock(const Fleet& fleet, const SimConfig& config) {
    validate_config(config);
    AsyncClock clock;
    for (const auto& n : fleet.nodes()) {
        auto it = config.initial_lambda.find(n.id);
        clock.lambda[n.id] = it == config.initial_lambda.end() ? 0.0 : it->second;
        clock.next_update_ns[n.id] = to_ns(sampling_time(config, n.id));
    }
    return clock;
}

AsyncClock step_asynchronous(const AsyncClock& clock, const Fleet& fleet, const Topology& topo,
                             const SimConfig& config) {
    validate_config(config);
    require_matching_sets(clock.lambda, fleet, topo);
    if (clock.next_update_ns.empty()) throw state_error("no pending updates");

    std::int64_t due = std::numeric_limits<std::int64_t>::max();
    for (const auto& [id, t] : clock.next_update_ns) due = std::min(due, t);

    AsyncClock next = clock;
    next.now_ns = due;
    for (const auto& [id, t] : clock.next_update_ns) {
        if (t != due) continue;
        NodeKernel kern(fleet.node(id));
        next.lambda[id] = next_lambda(clock.lambda.at(id), kern, topo.neighbors(id),
                                      clock.lambda, config.k, sampling_time(config, id));
        next.next_update_ns[id] = t + to_ns(sampling_time(config, id));
    }
    return next;
}

namespace {

class Engine {
public:
    Engine(Fleet fleet, Topology topo, SimConfig config, std::vector<ScenarioEvent> events)
        : fleet_(std::move(fleet)),
          topo_(std::move(topo)),
          config_(std::move(config)),
          events_(std::move(events)) {
        validate_config(config_);
        horizon_ns_ = to_ns(config_.horizon);

        std::map<int, double> ids;
        for (const auto& n : fleet_.nodes()) ids[n.id] = 0.0;
        require_matching_sets(ids, fleet_, topo_);
        if (!topo_.is_connected() && !config_.allow_disconnect)
            throw scenario_error("initial topology is disconnected");

        for (std::size_t i = 0; i < events_.size(); ++i) {
            if (events_[i].at < 0.0 || events_[i].at > config_.horizon)
                throw scenario_error("event timestamp outside [0, horizon]");
            if (i > 0 && events_[i].at < events_[i - 1].at)
                throw scenario_error("events not sorted by time");
        }
        for (const auto& [id, lam] : config_.initial_lambda)
            if (!fleet_.has_node(id))
                throw instance_error("initial_lambda references unknown node " +
                                     std::to_string(id));

        for (const auto& n : fleet_.nodes()) {
            kernels_.emplace(n.id, NodeKernel(n));
            lambda_[n.id] = 0.0;
            auto it = config_.initial_lambda.find(n.id);
            if (it != config_.initial_lambda.end()) lambda_[n.id] = it->second;
            next_ns_[n.id] = to_ns(sampling_time(config_, n.id));
        }
        stride_ = static_cast<std::size_t>(config_.record_stride);
    }

    SimResult execute() {
        apply_events_until(0);
        record(0);

        while (!next_ns_.empty()) {
            std::int64_t due = std::numeric_limits<std::int64_t>::max();
            for (const auto& [id, t] : next_ns_) due = std::min(due, t);
            if (due > horizon_ns_) break;

            apply_events_until(due);
            // A leave may have removed the due node; a join cannot schedule
            // at or before `due`. Re-derive the deadline if the set changed.
            if (next_ns_.empty()) break;
            std::int64_t due2 = std::numeric_limits<std::int64_t>::max();
            for (const auto& [id, t] : next_ns_) due2 = std::min(due2, t);
            if (due2 != due) continue;

            std::vector<int> batch;
            for (const auto& [id, t] : next_ns_)
                if (t == due) batch.push_back(id);

            std::map<int, double> updated;
            for (int id : batch)
                updated[id] = next_lambda(lambda_.at(id), kernels_.at(id), topo_.neighbors(id),
                                          lambda_, config_.k, sampling_time(config_, id));
            bool finite = true;
            for (int id : batch) {
                lambda_[id] = updated[id];
                next_ns_[id] = due + to_ns(sampling_time(config_, id));
                if (!std::isfinite(updated[id])) finite = false;
            }
            ++instant_;
            last_ns_ = due;
            if (!finite) {
                non_finite_ = true;
                record(due);
                break;
            }
            if (instant_ % stride_ == 0) record(due);
        }

        if (!non_finite_) apply_events_until(horizon_ns_);
        if (last_recorded_ns_ != last_ns_) record(last_ns_);

        return SimResult{std::move(trace_), std::move(fleet_), std::move(topo_),
                         std::move(lambda_), non_finite_};
    }

private:
    void apply_events_until(std::int64_t t_ns) {
        while (next_event_ < events_.size() && to_ns(events_[next_event_].at) <= t_ns) {
            apply(events_[next_event_]);
            ++next_event_;
        }
    }

    void apply(const ScenarioEvent& ev) {
        std::int64_t ev_ns = to_ns(ev.at);
        if (const auto* d = std::get_if<DemandStep>(&ev.action)) {
            if (!fleet_.has_node(d->node))
                throw scenario_error("demand_step on unknown node " + std::to_string(d->node));
            fleet_ = fleet_.with_demand(d->node, d->new_demand);
            kernels_.insert_or_assign(d->node, NodeKernel(fleet_.node(d->node)));
        } else if (const auto* l = std::get_if<NodeLeave>(&ev.action)) {
            if (!fleet_.has_node(l->node))
                throw scenario_error("node_leave on unknown node " + std::to_string(l->node));
            fleet_ = fleet_.without_node(l->node);
            topo_ = topo_.without_node(l->node);
            lambda_.erase(l->node);
            next_ns_.erase(l->node);
            kernels_.erase(l->node);
            if (!topo_.is_connected() && !config_.allow_disconnect)
                throw scenario_error("node_leave disconnected the communication graph");
        } else if (const auto* j = std::get_if<NodeJoin>(&ev.action)) {
            if (fleet_.has_node(j->spec.id))
                throw scenario_error("node_join duplicates id " + std::to_string(j->spec.id));
            for (const auto& e : j->edges) {
                int other = e.first == j->spec.id ? e.second : e.first;
                if (e.first != j->spec.id && e.second != j->spec.id)
                    throw scenario_error("node_join edge must touch the joining node");
                if (!topo_.has_node(other))
                    throw scenario_error("node_join edge references dead node " +
                                         std::to_string(other));
            }
            fleet_ = fleet_.with_node(j->spec);
            topo_ = topo_.with_node(j->spec.id, j->edges);
            kernels_.emplace(j->spec.id, NodeKernel(j->spec));
            lambda_[j->spec.id] = j->initial_lambda.value_or(0.0);
            next_ns_[j->spec.id] = ev_ns + to_ns(sampling_time(config_, j->spec.id));
        } else if (const auto* c = std::get_if<CapacityChange>(&ev.action)) {
            if (!fleet_.has_node(c->node))
                throw scenario_error("capacity_change on unknown node " +
                                     std::to_string(c->node));
            if (!(c->new_x_min <= c->new_x_max))
                throw scenario_error("capacity_change with x_min > x_max");
            fleet_ = fleet_.with_capacity(c->node, c->new_x_min, c->new_x_max);
            kernels_.insert_or_assign(c->node, NodeKernel(fleet_.node(c->node)));
        }
    }

    void record(std::int64_t t_ns) {
        TraceBlock b;
        b.t = to_seconds(t_ns);
        b.rows.reserve(lambda_.size());
        double lam_sum = 0.0;
        for (const auto& [id, lam] : lambda_) {
            const auto& kern = kernels_.at(id);
            TraceRow r;
            r.node = id;
            r.lambda = lam;
            r.x_hat = kern.x_hat(lam);
            r.grad = kern.dual_gradient(lam);
            b.rows.push_back(r);
            b.mismatch += r.grad;
            b.total_cost += kern.spec().cost.value(r.x_hat);
            b.lyapunov -= kern.dual_value(lam);
            lam_sum += lam;
        }
        for (const auto& e : topo_.edges()) {
            double d = lambda_.at(e.first) - lambda_.at(e.second);
            b.lyapunov += 0.5 * config_.k * d * d;
        }
        if (!b.rows.empty()) {
            double bar = lam_sum / static_cast<double>(b.rows.size());
            for (const auto& r : b.rows)
                b.disagreement = std::max(b.disagreement, std::abs(r.lambda - bar));
        }
        rows_ += b.rows.size();
        trace_.blocks.push_back(std::move(b));

        // Over budget: halve the recording density, keeping the t = 0 block.
        while (rows_ > config_.max_rows && trace_.blocks.size() > 2) {
            std::vector<TraceBlock> kept;
            kept.reserve(trace_.blocks.size() / 2 + 1);
            rows_ = 0;
            for (std::size_t i = 0; i < trace_.blocks.size(); i += 2) {
                rows_ += trace_.blocks[i].rows.size();
                kept.push_back(std::move(trace_.blocks[i]));
            }
            trace_.blocks = std::move(kept);
            stride_ *= 2;
        }
        last_recorded_ns_ = to_ns(trace_.blocks.back().t);
    }

    Fleet fleet_;
    Topology topo_;
    SimConfig config_;
    std::vector<ScenarioEvent> events_;
    std::map<int, NodeKernel> kernels_;
    std::map<int, double> lambda_;
    std::map<int, std::int64_t> next_ns_;
    std::int64_t horizon_ns_ = 0;
    std::int64_t last_ns_ = 0;
    std::int64_t last_recorded_ns_ = -1;
    std::size_t next_event_ = 0;
    std::size_t instant_ = 0;
    std::size_t stride_ = 1;
    std::size_t rows_ = 0;
    bool non_finite_ = false;
    Trace trace_;
};

}  // namespace

SimResult run(const Fleet& fleet, const Topology& topo, const SimConfig& config,
              const std::vector<ScenarioEvent>& events) {
    Engine engine(fleet, topo, config, events);
    return engine.execute();
}

DiagnosticSeries diagnostics(const Trace& trace, const Fleet& fleet, const Topology& topo,
                             double k) {
    if (trace.blocks.empty()) throw analysis_error("diagnostics on empty trace");
    std::map<int, NodeKernel> kernels;
    for (const auto& n : fleet.nodes()) kernels.emplace(n.id, NodeKernel(n));

    DiagnosticSeries out;
    for (const auto& b : trace.blocks) {
        std::map<int, double> lam;
        for (const auto& r : b.rows) lam[r.node] = r.lambda;

        double mismatch = 0.0, cost = 0.0, v = 0.0, lam_sum = 0.0;
        for (const auto& [id, l] : lam) {
            auto it = kernels.find(id);
            if (it == kernels.end())
                throw instance_error("trace row references unknown node " + std::to_string(id));
            const auto& kern = it->second;
            double x = kern.x_hat(l);
            mismatch += kern.dual_gradient(l);
            cost += kern.spec().cost.value(x);
            v -= kern.dual_value(l);
            lam_sum += l;
        }
        for (const auto& e : topo.edges()) {
            auto a = lam.find(e.first);
            auto c = lam.find(e.second);
            if (a == lam.end() || c == lam.end()) continue;
            double d = a->second - c->second;
            v += 0.5 * k * d * d;
        }
        double disagreement = 0.0;
        if (!lam.empty()) {
            double bar = lam_sum / static_cast<double>(lam.size());
            for (const auto& [id, l] : lam)
                disagreement = std::max(disagreement, std::abs(l - bar));
        }
        out.t.push_back(b.t);
        out.mismatch.push_back(mismatch);
        out.total_cost.push_back(cost);
        out.lyapunov.push_back(v);
        out.disagreement.push_back(disagreement);
    }
    return out;
}

DivergenceReport detect_divergence(const Trace& trace, const Fleet& fleet_at_end) {
    if (trace.blocks.size() < 2) throw analysis_error("trace too short for divergence analysis");
    if (fleet_at_end.empty()) throw analysis_error("divergence analysis on empty fleet");

    double t_first = trace.blocks.front().t;
    double t_last = trace.blocks.back().t;
    double span = t_last - t_first;
    double window = std::max(0.2 * span, 2.0);
    if (window > span + 1e-12) throw analysis_error("analysis window exceeds trace span");

    double cut = t_last - window - 1e-12;
    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    std::size_t n = 0;
    for (const auto& b : trace.blocks) {
        if (b.t < cut) continue;
        double lam = b.lambda_bar();
        st += b.t;
        sl += lam;
        stt += b.t * b.t;
        stl += b.t * lam;
        ++n;
    }
    if (n < 2) throw analysis_error("fewer than two trace points in the analysis window");

    double nn = static_cast<double>(n);
    double denom = nn * stt - st * st;
    double slope = denom != 0.0 ? (nn * stl - st * sl) / denom : 0.0;

    auto margin = feasibility_margin(fleet_at_end);
    double N = static_cast<double>(fleet_at_end.size());

    DivergenceReport report;
    report.measured_slope = slope;
    report.d0_up = -margin.upper_slack / N;
    report.d0_down = margin.lower_slack / N;
    report.window = window;

    if (!std::isfinite(slope)) {
        report.classification = DivergenceReport::Classification::diverging_up;
        return report;
    }

    double best = std::abs(slope);
    report.classification = DivergenceReport::Classification::converged;
    if (report.d0_up > 0.0 && std::abs(slope - report.d0_up) < best) {
        best = std::abs(slope - report.d0_up);
        report.classification = DivergenceReport::Classification::diverging_up;
    }
    if (report.d0_down < 0.0 && std::abs(slope - report.d0_down) < best) {
        report.classification = DivergenceReport::Classification::diverging_down;
    }
    return report;
}

}  // namespace dispatch
