#include "fracbp/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fracbp {

Graph Graph::from_edges(int node_count, std::vector<std::pair<int, int>> edges) {
  if (node_count <= 0) throw std::invalid_argument("graph needs at least one node");
  for (auto& [a, b] : edges) {
    if (a == b) throw std::invalid_argument("self-loop at node " + std::to_string(a));
    if (a > b) std::swap(a, b);
    if (a < 0 || b >= node_count)
      throw std::invalid_argument("edge endpoint out of range: (" + std::to_string(a) +
                                  "," + std::to_string(b) + ")");
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("parallel edge in edge list");

  Graph g;
  g.node_count_ = node_count;
  g.edges_ = std::move(edges);
  g.adjacency_.resize(static_cast<std::size_t>(node_count));
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto [a, b] = g.edges_[static_cast<std::size_t>(e)];
    g.adjacency_[static_cast<std::size_t>(a)].push_back({e, b});
    g.adjacency_[static_cast<std::size_t>(b)].push_back({e, a});
  }
  return g;
}

int Graph::find_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(a, b));
  if (it != edges_.end() && *it == std::make_pair(a, b))
    return static_cast<int>(it - edges_.begin());
  return -1;
}

bool Graph::connected() const {
  if (node_count_ == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(node_count_), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& inc : incident(v)) {
      if (!seen[static_cast<std::size_t>(inc.neighbor)]) {
        seen[static_cast<std::size_t>(inc.neighbor)] = 1;
        ++reached;
        stack.push_back(inc.neighbor);
      }
    }
  }
  return reached == node_count_;
}

int Graph::min_degree() const {
  int m = node_count_ > 0 ? degree(0) : 0;
  for (int v = 1; v < node_count_; ++v) m = std::min(m, degree(v));
  return m;
}

Graph build_grid(int n) {
  if (n < 2) throw std::invalid_argument("grid size must be at least 2");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(2 * n * (n - 1)));
  auto id = [n](int r, int c) { return r * n + c; };
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (c + 1 < n) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < n) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  return Graph::from_edges(n * n, std::move(edges));
}

Graph build_complete(int n) {
  if (n < 3) throw std::invalid_argument("complete graph size must be at least 3");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) edges.emplace_back(a, b);
  return Graph::from_edges(n, std::move(edges));
}

} // namespace fracbp
