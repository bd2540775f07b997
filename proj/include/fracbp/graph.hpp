#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace fracbp {

/// Incidence record: edge id plus the node at the other end.
struct IncidentEdge {
  int edge = -1;
  int neighbor = -1;
};

/// Simple undirected graph. Nodes are 0..node_count-1, edges are stored as
/// (a, b) with a < b in lexicographic order, no self-loops, no parallel
/// edges. The adjacency lists mirror the edge list exactly.
class Graph {
public:
  Graph() = default;

  /// Validates and canonicalizes the edge list (sorts endpoints and edges).
  /// Throws std::invalid_argument on self-loops, duplicates or out-of-range
  /// node indices.
  static Graph from_edges(int node_count, std::vector<std::pair<int, int>> edges);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::pair<int, int>& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  const std::vector<IncidentEdge>& incident(int node) const {
    return adjacency_[static_cast<std::size_t>(node)];
  }
  int degree(int node) const { return static_cast<int>(incident(node).size()); }

  /// Edge id for (a, b) in either endpoint order, or -1 if absent.
  int find_edge(int a, int b) const;

  bool connected() const;
  int min_degree() const;

private:
  int node_count_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<IncidentEdge>> adjacency_;
};

/// n-by-n square lattice, nearest neighbors, open boundary.
/// node id = row * n + col; n >= 2 (an isolated or degree-one lattice would
/// break the edge-uniform appearance preconditions downstream).
Graph build_grid(int n);

/// Complete graph K_n, n >= 3.
Graph build_complete(int n);

} // namespace fracbp
