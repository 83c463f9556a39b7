#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace dispatch {

/// Undirected, unweighted communication graph over integer node ids.
/// The Laplacian follows the usual 0/-1 convention: L_ii = degree(i),
/// L_ij = -1 iff {i, j} is an edge. Immutable after construction; node
/// removal and insertion return new values.
class Topology {
public:
    using Edge = std::pair<int, int>;

    /// Edges are stored with endpoints ordered ascending; self-loops,
    /// duplicates and unknown endpoints are construction errors.
    static Topology build(std::vector<int> node_ids, std::vector<Edge> edges);

    [[nodiscard]] const std::vector<int>& node_ids() const { return node_ids_; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] std::size_t size() const { return node_ids_.size(); }

    [[nodiscard]] bool has_node(int id) const;
    /// Neighbor ids in ascending order.
    [[nodiscard]] const std::vector<int>& neighbors(int id) const;

    [[nodiscard]] Eigen::MatrixXd laplacian() const;

    [[nodiscard]] bool is_connected() const;

    /// Second-smallest Laplacian eigenvalue; 0 iff disconnected.
    /// Dense symmetric eigensolve; tiny negative round-off is clamped to 0.
    [[nodiscard]] double sigma2() const;

    /// Induced subgraph with `id` and its incident edges removed.
    [[nodiscard]] Topology without_node(int id) const;

    /// Graph with `id` added and the given edges attached to existing nodes.
    [[nodiscard]] Topology with_node(int id, const std::vector<Edge>& new_edges) const;

private:
    Topology() = default;

    std::vector<int> node_ids_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adjacency_;  // parallel to node_ids_
    [[nodiscard]] std::size_t index_of(int id) const;
};

}  // namespace dispatch
