#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracbp/graph.hpp"

namespace fracbp {

/// Weighted set of spanning trees of a host graph. Trees are sorted lists of
/// host edge ids; weights are positive and sum to one. Duplicate trees are
/// allowed (a weighted multiset).
struct SpanningTreeSet {
  std::vector<std::vector<int>> trees;
  std::vector<double> weights;
};

/// Validation output: human-readable violations plus the per-edge tree
/// appearance counts and induced appearance probabilities.
struct TreeSetReport {
  std::vector<std::string> violations;
  std::vector<int> edge_counts;
  std::vector<double> induced_rho;
  bool ok() const { return violations.empty(); }
};

/// Per-edge appearance probabilities, optionally backed by an explicit tree
/// set whose induced probabilities equal `rho` bit-for-bit.
struct EdgeAppearance {
  std::vector<double> rho;
  std::optional<SpanningTreeSet> certificate;
};

/// Checks every SpanningTreeSet invariant and reports (never throws).
TreeSetReport validate_tree_set(const Graph& graph, const SpanningTreeSet& set);

/// rho_ab = (|V|-1)/|E| on every edge. Requires a connected graph with all
/// degrees >= 2; no certificate is attached.
EdgeAppearance edge_uniform_rho(const Graph& graph);

/// Edge-uniform certificate for a graph reachable from K_N by deleting the
/// listed K_N edge ids in order (empty order: the graph is K_N itself).
/// Returns |E| spanning trees of uniform weight 1/|E| with every edge in
/// exactly N-1 of them. Throws, naming the offending step, if a deletion
/// step admits no uniform repair.
SpanningTreeSet build_edge_uniform_certificate(const Graph& graph,
                                               const std::vector<int>& elimination_order);

/// Convenience: derive the elimination order as the lexicographic list of
/// K_N edges absent from the graph.
SpanningTreeSet build_edge_uniform_certificate(const Graph& graph);

/// Wraps a validated tree set as an EdgeAppearance; induced rho is stored.
EdgeAppearance appearance_from_certificate(const Graph& graph, SpanningTreeSet set);

/// rho^(lambda) = rho + lambda * (1 - rho), lambda in [0, 1].
std::vector<double> rho_lambda(const EdgeAppearance& appearance, double lambda);

/// Certificate file: graph header, edge table, then one tree per line as a
/// sorted edge-id list plus its weight (hex float, lossless).
void write_certificate(std::ostream& out, const Graph& graph, const SpanningTreeSet& set);
std::pair<Graph, SpanningTreeSet> read_certificate(std::istream& in);

} // namespace fracbp
