#include "fracbp/trw_weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fracbp {

namespace {

using EdgePair = std::pair<int, int>;
using PairTree = std::vector<EdgePair>; // sorted

std::string pair_str(const EdgePair& e) {
  return "(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")";
}

// Union-find spanning check over explicit node count.
bool is_spanning_tree(int node_count, const PairTree& tree) {
  if (static_cast<int>(tree.size()) != node_count - 1) return false;
  std::vector<int> parent(static_cast<std::size_t>(node_count));
  for (int v = 0; v < node_count; ++v) parent[static_cast<std::size_t>(v)] = v;
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  for (const auto& [a, b] : tree) {
    const int ra = find(a);
    const int rb = find(b);
    if (ra == rb) return false; // cycle
    parent[static_cast<std::size_t>(ra)] = rb;
  }
  return true; // V-1 acyclic edges on V nodes are connected
}

PairTree cycle_minus(const PairTree& cycle, std::size_t drop) {
  PairTree tree;
  for (std::size_t k = 0; k < cycle.size(); ++k)
    if (k != drop) tree.push_back(cycle[k]);
  std::sort(tree.begin(), tree.end());
  return tree;
}

// Linear spanning trees of K_N: |E| pairwise distinct Hamiltonian paths with
// every edge in exactly N-1 of them.
//
// Odd N: Walecki decomposition into (N-1)/2 Hamiltonian cycles through a hub
// vertex; every single-edge deletion of every cycle is one tree. Each edge
// lies in exactly one cycle and survives all its deletions but one.
//
// Even N: round-robin perfect matchings M_0..M_{N-2} on Z_{N-1} plus a hub;
// the union of consecutive matchings M_i and M_{i+1} is always a Hamiltonian
// cycle (the two reflections compose to a rotation by 2, and 2 generates
// Z_{N-1} since N-1 is odd). Deleting each M_i edge from that cycle gives
// N/2 trees per i; an edge of M_j shows up in the two cycles around j and is
// deleted exactly once, leaving N-1 appearances.
std::vector<PairTree> initial_tree_set(int n) {
  std::vector<PairTree> trees;
  if (n % 2 == 1) {
    const int circle = n - 1; // even
    const int hub = n - 1;
    for (int i = 0; i < circle / 2; ++i) {
      // zigzag path over the circle vertices, closed through the hub
      std::vector<int> seq{hub};
      seq.push_back(i);
      for (int k = 1; k < circle; ++k) {
        const int offset = (k % 2 == 1) ? (k + 1) / 2 : -(k / 2);
        seq.push_back(((i + offset) % circle + circle) % circle);
      }
      seq.push_back(hub);
      PairTree cycle;
      for (std::size_t k = 0; k + 1 < seq.size(); ++k)
        cycle.emplace_back(std::min(seq[k], seq[k + 1]), std::max(seq[k], seq[k + 1]));
      for (std::size_t drop = 0; drop < cycle.size(); ++drop)
        trees.push_back(cycle_minus(cycle, drop));
    }
  } else {
    const int circle = n - 1; // odd
    const int hub = n - 1;
    auto matching = [&](int i) {
      PairTree m;
      m.emplace_back(std::min(i % circle, hub), std::max(i % circle, hub));
      for (int k = 1; k <= n / 2 - 1; ++k) {
        const int a = ((i - k) % circle + circle) % circle;
        const int b = ((i + k) % circle + circle) % circle;
        m.emplace_back(std::min(a, b), std::max(a, b));
      }
      return m;
    };
    for (int i = 0; i < n - 1; ++i) {
      const PairTree mi = matching(i);
      const PairTree mnext = matching((i + 1) % (n - 1));
      PairTree cycle = mi;
      cycle.insert(cycle.end(), mnext.begin(), mnext.end());
      for (std::size_t drop = 0; drop < mi.size(); ++drop)
        trees.push_back(cycle_minus(cycle, drop));
    }
  }
  return trees;
}

std::map<EdgePair, int> edge_counts_of(const std::vector<PairTree>& trees) {
  std::map<EdgePair, int> counts;
  for (const auto& t : trees)
    for (const auto& e : t) ++counts[e];
  return counts;
}

// Component of `a` in tree minus `skip`.
std::set<int> side_of(const PairTree& tree, const EdgePair& skip, int a) {
  std::set<int> comp{a};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& e : tree) {
      if (e == skip) continue;
      const bool ha = comp.count(e.first) > 0;
      const bool hb = comp.count(e.second) > 0;
      if (ha != hb) {
        comp.insert(ha ? e.second : e.first);
        grew = true;
      }
    }
  }
  return comp;
}

// Lexicographically greedy bipartite matching (Kuhn) of broken trees to
// replacement edges; candidates[j] lists legal replacement indexes for the
// j-th broken tree, in ascending edge order.
bool perfect_matching(const std::vector<std::vector<int>>& candidates, int num_edges,
                      std::vector<int>& tree_to_edge) {
  const int num_trees = static_cast<int>(candidates.size());
  std::vector<int> edge_owner(static_cast<std::size_t>(num_edges), -1);
  tree_to_edge.assign(static_cast<std::size_t>(num_trees), -1);

  std::vector<char> visited;
  auto try_assign = [&](auto&& self, int tree) -> bool {
    for (int f : candidates[static_cast<std::size_t>(tree)]) {
      if (visited[static_cast<std::size_t>(f)]) continue;
      visited[static_cast<std::size_t>(f)] = 1;
      if (edge_owner[static_cast<std::size_t>(f)] == -1 ||
          self(self, edge_owner[static_cast<std::size_t>(f)])) {
        edge_owner[static_cast<std::size_t>(f)] = tree;
        tree_to_edge[static_cast<std::size_t>(tree)] = f;
        return true;
      }
    }
    return false;
  };

  for (int t = 0; t < num_trees; ++t) {
    visited.assign(static_cast<std::size_t>(num_edges), 0);
    if (!try_assign(try_assign, t)) return false;
  }
  return true;
}

} // namespace

TreeSetReport validate_tree_set(const Graph& graph, const SpanningTreeSet& set) {
  TreeSetReport report;
  report.edge_counts.assign(static_cast<std::size_t>(graph.edge_count()), 0);
  report.induced_rho.assign(static_cast<std::size_t>(graph.edge_count()), 0.0);

  if (set.weights.size() != set.trees.size())
    report.violations.push_back("weight count does not match tree count");

  for (std::size_t t = 0; t < set.trees.size(); ++t) {
    PairTree as_pairs;
    bool ids_ok = true;
    std::set<int> seen;
    for (int e : set.trees[t]) {
      if (e < 0 || e >= graph.edge_count()) {
        report.violations.push_back("tree " + std::to_string(t) +
                                    ": edge id out of range");
        ids_ok = false;
        break;
      }
      if (!seen.insert(e).second) {
        report.violations.push_back("tree " + std::to_string(t) + ": duplicate edge id");
        ids_ok = false;
        break;
      }
      as_pairs.push_back(graph.edge(e));
    }
    if (!ids_ok) continue;
    if (!is_spanning_tree(graph.node_count(), as_pairs)) {
      report.violations.push_back("tree " + std::to_string(t) + ": not spanning");
      continue;
    }
    if (t < set.weights.size())
      for (int e : set.trees[t]) {
        ++report.edge_counts[static_cast<std::size_t>(e)];
        report.induced_rho[static_cast<std::size_t>(e)] += set.weights[t];
      }
  }

  double weight_sum = 0.0;
  for (double w : set.weights) {
    if (!(w > 0.0))
      report.violations.push_back("non-positive tree weight");
    weight_sum += w;
  }
  if (std::abs(weight_sum - 1.0) > 1e-12)
    report.violations.push_back("weights not normalized");

  for (int e = 0; e < graph.edge_count(); ++e) {
    const double r = report.induced_rho[static_cast<std::size_t>(e)];
    if (!(r > 0.0))
      report.violations.push_back("edge " + pair_str(graph.edge(e)) +
                                  ": appears in no tree");
    else if (r > 1.0 + 1e-12)
      report.violations.push_back("edge " + pair_str(graph.edge(e)) +
                                  ": induced rho above 1");
  }
  return report;
}

EdgeAppearance edge_uniform_rho(const Graph& graph) {
  for (int v = 0; v < graph.node_count(); ++v)
    if (graph.degree(v) < 2)
      throw std::invalid_argument(
          "edge_uniform_rho: node " + std::to_string(v) +
          " has degree below 2; eliminate tree-like branches by direct summation "
          "before re-weighting");
  if (!graph.connected())
    throw std::invalid_argument("edge_uniform_rho: graph is disconnected");

  EdgeAppearance appearance;
  appearance.rho.assign(static_cast<std::size_t>(graph.edge_count()),
                        static_cast<double>(graph.node_count() - 1) /
                            static_cast<double>(graph.edge_count()));
  return appearance;
}

namespace {

// Applies elimination `step`, searching over the choice of dropped tree and
// over the assignment of replacement edges (lowest-indexed legal edge first,
// backtracking only when a later step runs out of repairs). `budget` caps
// the total number of choices explored.
bool eliminate_from(const std::vector<PairTree>& trees,
                    const std::vector<EdgePair>& gone_list, std::size_t step,
                    long& budget, std::size_t& failed_step,
                    std::vector<PairTree>& out) {
  if (step == gone_list.size()) {
    out = trees;
    return true;
  }
  const EdgePair gone = gone_list[step];

  std::vector<int> broken;
  for (std::size_t t = 0; t < trees.size(); ++t)
    if (std::binary_search(trees[t].begin(), trees[t].end(), gone))
      broken.push_back(static_cast<int>(t));

  // One broken tree is dropped; its surviving edges are exactly the edges
  // whose appearance count fell short, so they are the replacement pool.
  for (std::size_t pick = 0; pick < broken.size(); ++pick) {
    if (--budget < 0) return false;
    const int dropped = broken[pick];
    std::vector<EdgePair> pool;
    for (const auto& e : trees[static_cast<std::size_t>(dropped)])
      if (e != gone) pool.push_back(e);
    std::sort(pool.begin(), pool.end());

    std::vector<int> rest;
    for (int t : broken)
      if (t != dropped) rest.push_back(t);

    std::vector<std::vector<int>> candidates(rest.size());
    for (std::size_t j = 0; j < rest.size(); ++j) {
      const auto& tree = trees[static_cast<std::size_t>(rest[j])];
      const auto side = side_of(tree, gone, gone.first);
      for (std::size_t f = 0; f < pool.size(); ++f) {
        const bool ha = side.count(pool[f].first) > 0;
        const bool hb = side.count(pool[f].second) > 0;
        const bool in_tree = std::binary_search(tree.begin(), tree.end(), pool[f]);
        if (ha != hb && !in_tree) candidates[j].push_back(static_cast<int>(f));
      }
    }

    std::vector<int> match;
    if (!perfect_matching(candidates, static_cast<int>(pool.size()), match)) continue;

    // Enumerate assignments depth-first; a matching that repairs this step
    // can still strand a later one.
    std::vector<char> used(pool.size(), 0);
    std::vector<int> assigned(rest.size(), -1);
    auto dfs = [&](auto&& self, std::size_t j) -> bool {
      if (--budget < 0) return false;
      if (j == rest.size()) {
        std::vector<PairTree> next;
        next.reserve(trees.size() - 1);
        for (std::size_t t = 0; t < trees.size(); ++t) {
          if (static_cast<int>(t) == dropped) continue;
          PairTree tree = trees[t];
          const auto it = std::find(tree.begin(), tree.end(), gone);
          if (it != tree.end()) {
            const std::size_t r = static_cast<std::size_t>(
                std::find(rest.begin(), rest.end(), static_cast<int>(t)) - rest.begin());
            *it = pool[static_cast<std::size_t>(assigned[r])];
            std::sort(tree.begin(), tree.end());
          }
          next.push_back(std::move(tree));
        }
        return eliminate_from(next, gone_list, step + 1, budget, failed_step, out);
      }
      for (int f : candidates[j]) {
        if (used[static_cast<std::size_t>(f)]) continue;
        used[static_cast<std::size_t>(f)] = 1;
        assigned[j] = f;
        if (self(self, j + 1)) return true;
        used[static_cast<std::size_t>(f)] = 0;
        assigned[j] = -1;
      }
      return false;
    };
    if (dfs(dfs, 0)) return true;
  }
  failed_step = std::max(failed_step, step);
  return false;
}

} // namespace

SpanningTreeSet build_edge_uniform_certificate(const Graph& graph,
                                               const std::vector<int>& elimination_order) {
  const int n = graph.node_count();
  if (n < 3)
    throw std::invalid_argument("certificate construction needs at least 3 nodes");

  // Canonical K_N edge table; elimination ids refer to it.
  std::vector<EdgePair> complete_edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) complete_edges.emplace_back(a, b);

  std::set<EdgePair> current(complete_edges.begin(), complete_edges.end());
  std::vector<int> degree(static_cast<std::size_t>(n), n - 1);
  std::vector<EdgePair> gone_list;
  for (std::size_t step = 0; step < elimination_order.size(); ++step) {
    const int eid = elimination_order[step];
    if (eid < 0 || eid >= static_cast<int>(complete_edges.size()))
      throw std::invalid_argument("elimination step " + std::to_string(step) +
                                  ": K_N edge id out of range");
    const EdgePair gone = complete_edges[static_cast<std::size_t>(eid)];
    if (current.erase(gone) == 0)
      throw std::invalid_argument("elimination step " + std::to_string(step) + ": edge " +
                                  pair_str(gone) + " already removed");
    if (--degree[static_cast<std::size_t>(gone.first)] < 2 ||
        --degree[static_cast<std::size_t>(gone.second)] < 2)
      throw std::invalid_argument("elimination step " + std::to_string(step) + ": edge " +
                                  pair_str(gone) + " drops a node below degree 2");
  }

  std::vector<PairTree> trees;
  long budget = 200000;
  std::size_t failed_step = 0;
  for (int eid : elimination_order)
    gone_list.push_back(complete_edges[static_cast<std::size_t>(eid)]);
  if (!eliminate_from(initial_tree_set(n), gone_list, 0, budget, failed_step, trees)) {
    const EdgePair gone = gone_list[failed_step];
    throw std::invalid_argument("elimination step " + std::to_string(failed_step) +
                                ": edge " + pair_str(gone) +
                                " admits no uniform repair");
  }

  {
    // Uniformity check on the final set.
    const auto counts = edge_counts_of(trees);
    if (trees.size() != current.size())
      throw std::logic_error("certificate construction lost tree-count invariant");
    for (const auto& e : current)
      if (auto it = counts.find(e); it == counts.end() || it->second != n - 1)
        throw std::logic_error("certificate construction lost uniformity on edge " +
                               pair_str(e));
  }

  // The surviving edge set must be the given graph.
  std::set<EdgePair> target(graph.edges().begin(), graph.edges().end());
  if (current != target)
    throw std::invalid_argument(
        "elimination order does not reduce K_N to the given graph");

  SpanningTreeSet set;
  const double w = 1.0 / static_cast<double>(trees.size());
  for (const auto& tree : trees) {
    std::vector<int> ids;
    for (const auto& e : tree) ids.push_back(graph.find_edge(e.first, e.second));
    std::sort(ids.begin(), ids.end());
    set.trees.push_back(std::move(ids));
    set.weights.push_back(w);
  }

  const auto report = validate_tree_set(graph, set);
  if (!report.ok())
    throw std::logic_error("constructed certificate failed validation: " +
                           report.violations.front());
  return set;
}

SpanningTreeSet build_edge_uniform_certificate(const Graph& graph) {
  const int n = graph.node_count();
  std::vector<int> order;
  int id = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (graph.find_edge(a, b) < 0) order.push_back(id);
      ++id;
    }
  return build_edge_uniform_certificate(graph, order);
}

EdgeAppearance appearance_from_certificate(const Graph& graph, SpanningTreeSet set) {
  const auto report = validate_tree_set(graph, set);
  if (!report.ok())
    throw std::invalid_argument("certificate invalid: " + report.violations.front());
  EdgeAppearance appearance;
  appearance.rho = report.induced_rho;
  appearance.certificate = std::move(set);
  return appearance;
}

std::vector<double> rho_lambda(const EdgeAppearance& appearance, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("lambda must lie in [0, 1]");
  std::vector<double> out(appearance.rho.size());
  for (std::size_t e = 0; e < out.size(); ++e)
    out[e] = appearance.rho[e] + lambda * (1.0 - appearance.rho[e]);
  return out;
}

void write_certificate(std::ostream& out, const Graph& graph, const SpanningTreeSet& set) {
  out << "graph " << graph.node_count() << ' ' << graph.edge_count() << '\n';
  for (int e = 0; e < graph.edge_count(); ++e)
    out << "edge " << e << ' ' << graph.edge(e).first << ' ' << graph.edge(e).second
        << '\n';
  char buf[48];
  for (std::size_t t = 0; t < set.trees.size(); ++t) {
    out << "tree";
    for (int e : set.trees[t]) out << ' ' << e;
    std::snprintf(buf, sizeof buf, "%a", set.weights[t]);
    out << ' ' << buf << '\n';
  }
}

std::pair<Graph, SpanningTreeSet> read_certificate(std::istream& in) {
  std::string tag;
  int node_count = 0;
  int edge_count = 0;
  if (!(in >> tag >> node_count >> edge_count) || tag != "graph")
    throw std::runtime_error("certificate: missing 'graph' header");
  std::vector<EdgePair> edges(static_cast<std::size_t>(edge_count));
  for (int i = 0; i < edge_count; ++i) {
    int id = 0;
    int a = 0;
    int b = 0;
    if (!(in >> tag >> id >> a >> b) || tag != "edge" || id != i)
      throw std::runtime_error("certificate: bad edge record " + std::to_string(i));
    edges[static_cast<std::size_t>(i)] = {a, b};
  }
  Graph graph = Graph::from_edges(node_count, edges);
  // from_edges canonicalizes edge order; remap the file's edge ids onto it.
  std::vector<int> to_canonical(static_cast<std::size_t>(edge_count));
  for (int i = 0; i < edge_count; ++i)
    to_canonical[static_cast<std::size_t>(i)] =
        graph.find_edge(edges[static_cast<std::size_t>(i)].first,
                        edges[static_cast<std::size_t>(i)].second);

  SpanningTreeSet set;
  while (in >> tag) {
    if (tag != "tree") throw std::runtime_error("certificate: expected 'tree' record");
    std::vector<int> ids(static_cast<std::size_t>(node_count - 1));
    for (int& e : ids) {
      if (!(in >> e)) throw std::runtime_error("certificate: truncated tree record");
      if (e >= 0 && e < edge_count) e = to_canonical[static_cast<std::size_t>(e)];
    }
    std::sort(ids.begin(), ids.end());
    std::string weight_tok;
    if (!(in >> weight_tok)) throw std::runtime_error("certificate: missing tree weight");
    set.trees.push_back(std::move(ids));
    set.weights.push_back(std::strtod(weight_tok.c_str(), nullptr));
  }
  return {std::move(graph), std::move(set)};
}

} // namespace fracbp
