#include "dispatch/topology.hpp"

#include "dispatch/errors.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace dispatch {

Topology Topology::build(std::vector<int> node_ids, std::vector<Edge> edges) {
    Topology t;
    t.node_ids_ = std::move(node_ids);

    std::set<int> ids(t.node_ids_.begin(), t.node_ids_.end());
    if (ids.size() != t.node_ids_.size()) throw instance_error("duplicate node id in topology");

    std::set<Edge> seen;
    for (auto& e : edges) {
        if (e.first == e.second)
            throw instance_error("self-loop at node " + std::to_string(e.first));
        if (e.first > e.second) std::swap(e.first, e.second);
        if (!ids.count(e.first) || !ids.count(e.second))
            throw instance_error("edge (" + std::to_string(e.first) + ", " +
                                 std::to_string(e.second) + ") references unknown node");
        if (!seen.insert(e).second)
            throw instance_error("duplicate edge (" + std::to_string(e.first) + ", " +
                                 std::to_string(e.second) + ")");
    }
    t.edges_.assign(seen.begin(), seen.end());

    t.adjacency_.assign(t.node_ids_.size(), {});
    for (const auto& e : t.edges_) {
        t.adjacency_[t.index_of(e.first)].push_back(e.second);
        t.adjacency_[t.index_of(e.second)].push_back(e.first);
    }
    for (auto& nb : t.adjacency_) std::sort(nb.begin(), nb.end());
    return t;
}

std::size_t Topology::index_of(int id) const {
    for (std::size_t i = 0; i < node_ids_.size(); ++i)
        if (node_ids_[i] == id) return i;
    throw instance_error("unknown node id " + std::to_string(id) + " in topology");
}

bool Topology::has_node(int id) const {
    return std::find(node_ids_.begin(), node_ids_.end(), id) != node_ids_.end();
}

const std::vector<int>& Topology::neighbors(int id) const {
    return adjacency_[index_of(id)];
}

Eigen::MatrixXd Topology::laplacian() const {
    const auto n = static_cast<Eigen::Index>(node_ids_.size());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : edges_) {
        auto i = static_cast<Eigen::Index>(index_of(e.first));
        auto j = static_cast<Eigen::Index>(index_of(e.second));
        L(i, i) += 1.0;
        L(j, j) += 1.0;
        L(i, j) -= 1.0;
        L(j, i) -= 1.0;
    }
    return L;
}

bool Topology::is_connected() const {
    if (node_ids_.empty()) return false;
    std::vector<bool> visited(node_ids_.size(), false);
    std::vector<std::size_t> stack = {0};
    visited[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        std::size_t i = stack.back();
        stack.pop_back();
        for (int nb : adjacency_[i]) {
            std::size_t j = index_of(nb);
            if (!visited[j]) {
                visited[j] = true;
                ++reached;
                stack.push_back(j);
            }
        }
    }
    return reached == node_ids_.size();
}

double Topology::sigma2() const {
    if (node_ids_.size() < 2) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian(),
                                                          Eigen::EigenvaluesOnly);
    double s2 = solver.eigenvalues()(1);
    return s2 < 0.0 ? 0.0 : s2;
}

Topology Topology::without_node(int id) const {
    if (!has_node(id)) throw instance_error("unknown node id " + std::to_string(id));
    std::vector<int> ids;
    ids.reserve(node_ids_.size() - 1);
    for (int n : node_ids_)
        if (n != id) ids.push_back(n);
    std::vector<Edge> kept;
    for (const auto& e : edges_)
        if (e.first != id && e.second != id) kept.push_back(e);
    return build(std::move(ids), std::move(kept));
}

Topology Topology::with_node(int id, const std::vector<Edge>& new_edges) const {
    if (has_node(id)) throw instance_error("node id " + std::to_string(id) + " already present");
    auto ids = node_ids_;
    ids.push_back(id);
    auto all = edges_;
    for (const auto& e : new_edges) {
        if (e.first != id && e.second != id)
            throw instance_error("join edge must touch the joining node");
        all.push_back(e);
    }
    return build(std::move(ids), std::move(all));
}

}  // namespace dispatch
