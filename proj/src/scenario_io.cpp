#include "dispatch/scenario_io.hpp"

#include "dispatch/errors.hpp"

#include <fstream>
#include <utility>

namespace dispatch {

using nlohmann::json;

namespace {

double require_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw instance_error(where + ": missing or non-numeric field '" + key + "'");
    return obj[key].get<double>();
}

NodeSpec parse_node(const json& jn) {
    if (!jn.is_object()) throw instance_error("instance.nodes: entry is not an object");
    if (!jn.contains("id") || !jn["id"].is_number_integer())
        throw instance_error("instance.nodes: missing integer field 'id'");
    int id = jn["id"].get<int>();
    std::string where = "node " + std::to_string(id);

    NodeSpec n;
    n.id = id;
    n.cost = ScalarFunction::quadratic(require_number(jn, "a", where), require_number(jn, "b", where),
                                       require_number(jn, "c", where));
    n.loss = ScalarFunction::quadratic(0.0, 0.0, require_number(jn, "alpha", where));
    n.x_min = require_number(jn, "x_min", where);
    n.x_max = require_number(jn, "x_max", where);
    n.demand = require_number(jn, "demand", where);
    return n;
}

json node_to_json(const NodeSpec& n) {
    if (!n.cost.is_quadratic() || !n.loss.is_quadratic() || n.loss.a() != 0.0 || n.loss.b() != 0.0)
        throw instance_error("node " + std::to_string(n.id) +
                             ": only quadratic cost and alpha*x^2 loss serialize");
    json j;
    j["id"] = n.id;
    j["a"] = n.cost.a();
    j["b"] = n.cost.b();
    j["c"] = n.cost.c();
    j["alpha"] = n.loss.c();
    j["x_min"] = n.x_min;
    j["x_max"] = n.x_max;
    j["demand"] = n.demand;
    return j;
}

std::vector<Topology::Edge> parse_edges(const json& arr, const std::string& where) {
    if (!arr.is_array()) throw instance_error(where + ": expected an array of [i, j] pairs");
    std::vector<Topology::Edge> edges;
    for (const auto& je : arr) {
        if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() ||
            !je[1].is_number_integer())
            throw instance_error(where + ": each edge must be an [i, j] integer pair");
        edges.emplace_back(je[0].get<int>(), je[1].get<int>());
    }
    return edges;
}

std::map<int, double> parse_id_map(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw instance_error(where + ": expected an object keyed by node id");
    std::map<int, double> out;
    for (const auto& [key, value] : obj.items()) {
        if (!value.is_number()) throw instance_error(where + "." + key + ": expected a number");
        try {
            out[std::stoi(key)] = value.get<double>();
        } catch (const std::exception&) {
            throw instance_error(where + ": key '" + key + "' is not a node id");
        }
    }
    return out;
}

SimConfig parse_sim(const json& js) {
    SimConfig cfg;
    cfg.k = require_number(js, "k", "sim");
    cfg.T = require_number(js, "T", "sim");
    cfg.horizon = require_number(js, "horizon", "sim");
    if (js.contains("T_per_node")) cfg.T_per_node = parse_id_map(js["T_per_node"], "sim.T_per_node");
    if (js.contains("initial_lambda"))
        cfg.initial_lambda = parse_id_map(js["initial_lambda"], "sim.initial_lambda");
    if (js.contains("record_stride")) {
        if (!js["record_stride"].is_number_integer())
            throw instance_error("sim.record_stride: expected an integer");
        cfg.record_stride = js["record_stride"].get<int>();
    }
    if (js.contains("max_rows")) {
        if (!js["max_rows"].is_number_unsigned())
            throw instance_error("sim.max_rows: expected a nonnegative integer");
        cfg.max_rows = js["max_rows"].get<std::size_t>();
    }
    if (js.contains("allow_disconnect")) {
        if (!js["allow_disconnect"].is_boolean())
            throw instance_error("sim.allow_disconnect: expected a boolean");
        cfg.allow_disconnect = js["allow_disconnect"].get<bool>();
    }
    return cfg;
}

ScenarioEvent parse_event(const json& je, std::size_t index) {
    std::string where = "events[" + std::to_string(index) + "]";
    if (!je.is_object()) throw instance_error(where + ": expected an object");
    ScenarioEvent ev;
    ev.at = require_number(je, "at", where);
    if (!je.contains("kind") || !je["kind"].is_string())
        throw instance_error(where + ": missing string field 'kind'");
    std::string kind = je["kind"].get<std::string>();

    if (kind == "demand_step") {
        DemandStep a;
        a.node = static_cast<int>(require_number(je, "node", where));
        a.new_demand = require_number(je, "new_demand", where);
        ev.action = a;
    } else if (kind == "node_leave") {
        NodeLeave a;
        a.node = static_cast<int>(require_number(je, "node", where));
        ev.action = a;
    } else if (kind == "node_join") {
        NodeJoin a;
        if (!je.contains("spec")) throw instance_error(where + ": node_join requires 'spec'");
        a.spec = parse_node(je["spec"]);
        if (je.contains("edges")) a.edges = parse_edges(je["edges"], where + ".edges");
        if (je.contains("initial_lambda"))
            a.initial_lambda = require_number(je, "initial_lambda", where);
        ev.action = a;
    } else if (kind == "capacity_change") {
        CapacityChange a;
        a.node = static_cast<int>(require_number(je, "node", where));
        a.new_x_min = require_number(je, "new_x_min", where);
        a.new_x_max = require_number(je, "new_x_max", where);
        ev.action = a;
    } else {
        throw instance_error(where + ": unknown event kind '" + kind + "'");
    }
    return ev;
}

json event_to_json(const ScenarioEvent& ev) {
    json j;
    j["at"] = ev.at;
    if (const auto* d = std::get_if<DemandStep>(&ev.action)) {
        j["kind"] = "demand_step";
        j["node"] = d->node;
        j["new_demand"] = d->new_demand;
    } else if (const auto* l = std::get_if<NodeLeave>(&ev.action)) {
        j["kind"] = "node_leave";
        j["node"] = l->node;
    } else if (const auto* n = std::get_if<NodeJoin>(&ev.action)) {
        j["kind"] = "node_join";
        j["spec"] = node_to_json(n->spec);
        json edges = json::array();
        for (const auto& e : n->edges) edges.push_back({e.first, e.second});
        j["edges"] = edges;
        if (n->initial_lambda) j["initial_lambda"] = *n->initial_lambda;
    } else if (const auto* c = std::get_if<CapacityChange>(&ev.action)) {
        j["kind"] = "capacity_change";
        j["node"] = c->node;
        j["new_x_min"] = c->new_x_min;
        j["new_x_max"] = c->new_x_max;
    }
    return j;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) throw instance_error("scenario document must be a JSON object");
    if (!doc.contains("instance") || !doc["instance"].is_object() ||
        !doc["instance"].contains("nodes") || !doc["instance"]["nodes"].is_array())
        throw instance_error("missing instance.nodes array");

    Scenario sc;
    if (doc.contains("meta")) sc.meta = doc["meta"];

    std::vector<NodeSpec> nodes;
    for (const auto& jn : doc["instance"]["nodes"]) nodes.push_back(parse_node(jn));
    sc.fleet = Fleet(std::move(nodes));

    if (doc.contains("topology")) {
        if (!doc["topology"].is_object() || !doc["topology"].contains("edges"))
            throw instance_error("topology: expected an object with an 'edges' array");
        std::vector<int> ids;
        for (const auto& n : sc.fleet.nodes()) ids.push_back(n.id);
        sc.topology =
            Topology::build(std::move(ids), parse_edges(doc["topology"]["edges"], "topology.edges"));
    }

    if (doc.contains("sim")) sc.sim = parse_sim(doc["sim"]);

    if (doc.contains("events")) {
        if (!doc["events"].is_array()) throw instance_error("events: expected an array");
        std::size_t i = 0;
        for (const auto& je : doc["events"]) sc.events.push_back(parse_event(je, i++));
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw instance_error("cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw instance_error(path + ": " + e.what());
    }
    return parse_scenario(doc);
}

json to_json(const Scenario& scenario) {
    json doc;
    if (!scenario.meta.is_null()) doc["meta"] = scenario.meta;

    json nodes = json::array();
    for (const auto& n : scenario.fleet.nodes()) nodes.push_back(node_to_json(n));
    doc["instance"]["nodes"] = nodes;

    if (scenario.topology) {
        json edges = json::array();
        for (const auto& e : scenario.topology->edges()) edges.push_back({e.first, e.second});
        doc["topology"]["edges"] = edges;
    }
    if (scenario.sim) {
        const auto& cfg = *scenario.sim;
        json js;
        js["k"] = cfg.k;
        js["T"] = cfg.T;
        js["horizon"] = cfg.horizon;
        if (!cfg.T_per_node.empty()) {
            json m;
            for (const auto& [id, t] : cfg.T_per_node) m[std::to_string(id)] = t;
            js["T_per_node"] = m;
        }
        if (!cfg.initial_lambda.empty()) {
            json m;
            for (const auto& [id, lam] : cfg.initial_lambda) m[std::to_string(id)] = lam;
            js["initial_lambda"] = m;
        }
        if (cfg.record_stride != 1) js["record_stride"] = cfg.record_stride;
        if (cfg.max_rows != SimConfig{}.max_rows) js["max_rows"] = cfg.max_rows;
        if (cfg.allow_disconnect) js["allow_disconnect"] = true;
        doc["sim"] = js;
    }
    if (!scenario.events.empty()) {
        json evs = json::array();
        for (const auto& ev : scenario.events) evs.push_back(event_to_json(ev));
        doc["events"] = evs;
    }
    return doc;
}

void save_scenario(const std::string& path, const Scenario& scenario) {
    std::ofstream out(path);
    if (!out) throw instance_error("cannot write " + path);
    out << to_json(scenario).dump(2) << "\n";
}

}  // namespace dispatch
