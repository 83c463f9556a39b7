#pragma once

#include <stdexcept>
#include <string>

namespace dispatch {

/// Malformed or structurally invalid instance (bad node data, bad graph, bad file).
class instance_error : public std::runtime_error {
public:
    explicit instance_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Supply-demand balance cannot be met inside the capacity box.
/// Carries both slacks so callers can report which side failed.
class infeasibility_error : public std::runtime_error {
public:
    infeasibility_error(const std::string& msg, double lower_slack, double upper_slack)
        : std::runtime_error(msg), lower_slack_(lower_slack), upper_slack_(upper_slack) {}

    [[nodiscard]] double lower_slack() const { return lower_slack_; }
    [[nodiscard]] double upper_slack() const { return upper_slack_; }

private:
    double lower_slack_;
    double upper_slack_;
};

/// Simulator state does not match the fleet/topology it is stepped against.
class state_error : public std::runtime_error {
public:
    explicit state_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Scenario event refers to a dead/unknown node or would corrupt the topology.
class scenario_error : public std::runtime_error {
public:
    explicit scenario_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Trace post-processing asked for more data than the trace contains.
class analysis_error : public std::runtime_error {
public:
    explicit analysis_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite value where a finite one is required.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Iterative scheme exhausted its iteration budget.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Grid search found no point inside the feasibility band.
/// Distinct from infeasibility_error: the instance itself may be feasible.
class oracle_infeasible : public std::runtime_error {
public:
    explicit oracle_infeasible(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dispatch
