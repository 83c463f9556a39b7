#pragma once

#include "dispatch/distsim.hpp"
#include "dispatch/model.hpp"
#include "dispatch/topology.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dispatch {

/// One scenario document: instance, optional communication graph, optional
/// simulation parameters, optional timed events. `meta` is carried through
/// untouched so provenance notes survive a round trip.
struct Scenario {
    Fleet fleet;
    std::optional<Topology> topology;
    std::optional<SimConfig> sim;
    std::vector<ScenarioEvent> events;
    nlohmann::json meta;
};

/// Parses a scenario document. Malformed input throws instance_error with the
/// offending field (or the parser's position for syntax errors).
[[nodiscard]] Scenario parse_scenario(const nlohmann::json& doc);
[[nodiscard]] Scenario load_scenario(const std::string& path);

/// Serialization covers quadratic costs and alpha*x^2 losses, the classes the
/// file format can name; anything else throws instance_error.
[[nodiscard]] nlohmann::json to_json(const Scenario& scenario);
void save_scenario(const std::string& path, const Scenario& scenario);

}  // namespace dispatch
