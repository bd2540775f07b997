#include "fracbp/oracle.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "fracbp/numerics.hpp"

namespace fracbp {

namespace {

// Gray-code walk over 2^bits states of the spins listed in `active`.
// Calls visit(log_weight) for every state; spins is kept in sync.
// The incremental log-weight is re-derived from scratch every 4096 steps to
// stop rounding drift from accumulating over million-step walks.
template <typename Visit>
void gray_walk(const IsingModel& model, std::vector<int>& spins,
               const std::vector<int>& active, Visit&& visit) {
  const auto& g = model.graph;
  auto exact_log_weight = [&]() {
    double e = 0.0;
    for (int eid = 0; eid < g.edge_count(); ++eid) {
      const auto [a, b] = g.edge(eid);
      e += model.couplings[static_cast<std::size_t>(eid)] *
           spins[static_cast<std::size_t>(a)] * spins[static_cast<std::size_t>(b)];
    }
    for (int v = 0; v < g.node_count(); ++v)
      e += model.fields[static_cast<std::size_t>(v)] * spins[static_cast<std::size_t>(v)];
    return e; // log weight = -E = +ΣJxx + Σhx
  };

  const int bits = static_cast<int>(active.size());
  const std::uint64_t total = std::uint64_t{1} << bits;
  double lw = exact_log_weight();
  visit(lw);
  for (std::uint64_t k = 1; k < total; ++k) {
    const int bit = std::countr_zero(k);
    const int v = active[static_cast<std::size_t>(bit)];
    double local = model.fields[static_cast<std::size_t>(v)];
    for (const auto& inc : g.incident(v))
      local += model.couplings[static_cast<std::size_t>(inc.edge)] *
               spins[static_cast<std::size_t>(inc.neighbor)];
    lw -= 2.0 * spins[static_cast<std::size_t>(v)] * local;
    spins[static_cast<std::size_t>(v)] = -spins[static_cast<std::size_t>(v)];
    if ((k & 0xFFFu) == 0) lw = exact_log_weight();
    visit(lw);
  }
  // walk ends wherever the Gray code leaves it; callers reset spins
}

} // namespace

ExactResult brute_force(const IsingModel& model, int cap) {
  const auto& g = model.graph;
  const int n = g.node_count();
  if (n > 25) throw std::invalid_argument("brute_force: above the 25-node ceiling");
  if (n > cap) throw std::invalid_argument("brute_force: above the enumeration cap");
  if (n > 20)
    std::fprintf(stderr, "brute_force: enumerating 2^%d states, expect a wait\n", n);

  bool zero_field = true;
  for (double h : model.fields) zero_field = zero_field && h == 0.0;

  std::vector<int> active;
  for (int v = zero_field ? 1 : 0; v < n; ++v) active.push_back(v);

  auto fresh_spins = [&]() {
    std::vector<int> s(static_cast<std::size_t>(n), -1);
    if (zero_field) s[0] = 1; // half-space representative
    return s;
  };

  // Pass 1: running maximum of the log weights, for one stable scaling.
  double max_lw = -std::numeric_limits<double>::infinity();
  {
    std::vector<int> spins = fresh_spins();
    gray_walk(model, spins, active, [&](double lw) { max_lw = std::max(max_lw, lw); });
  }

  // Pass 2: scaled sums for Z and the marginals.
  KahanSum z_sum;
  std::vector<std::array<KahanSum, 2>> node_acc(static_cast<std::size_t>(n));
  std::vector<std::array<KahanSum, 4>> edge_acc(static_cast<std::size_t>(g.edge_count()));
  {
    std::vector<int> spins = fresh_spins();
    gray_walk(model, spins, active, [&](double lw) {
      const double w = std::exp(lw - max_lw);
      z_sum.add(w);
      if (!zero_field)
        for (int v = 0; v < n; ++v)
          node_acc[static_cast<std::size_t>(v)][spins[static_cast<std::size_t>(v)] > 0 ? 1 : 0]
              .add(w);
      for (int e = 0; e < g.edge_count(); ++e) {
        const auto [a, b] = g.edge(e);
        const int ia = spins[static_cast<std::size_t>(a)] > 0 ? 1 : 0;
        const int ib = spins[static_cast<std::size_t>(b)] > 0 ? 1 : 0;
        edge_acc[static_cast<std::size_t>(e)][static_cast<std::size_t>(ia * 2 + ib)].add(w);
      }
    });
  }

  ExactResult result;
  result.node_marginals.resize(static_cast<std::size_t>(n));
  result.edge_marginals.resize(static_cast<std::size_t>(g.edge_count()));

  if (zero_field) {
    // Each visited state stands for itself and its global flip, so
    // B(s,t) = (acc(s,t) + acc(-s,-t)) / (2 Σ). Node marginals are exactly
    // one half, and edge rows marginalize to exactly one half as well.
    result.log_z = max_lw + std::log(z_sum.value()) + std::log(2.0);
    for (int v = 0; v < n; ++v) result.node_marginals[static_cast<std::size_t>(v)] = {0.5, 0.5};
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto& acc = edge_acc[static_cast<std::size_t>(e)];
      const double aligned = acc[0].value() + acc[3].value();  // (-,-) + (+,+)
      const double opposed = acc[1].value() + acc[2].value();
      const double denom = 2.0 * (aligned + opposed);
      result.edge_marginals[static_cast<std::size_t>(e)] = {
          aligned / denom, opposed / denom, opposed / denom, aligned / denom};
    }
  } else {
    result.log_z = max_lw + std::log(z_sum.value());
    for (int v = 0; v < n; ++v) {
      const auto& acc = node_acc[static_cast<std::size_t>(v)];
      const double denom = acc[0].value() + acc[1].value();
      result.node_marginals[static_cast<std::size_t>(v)] = {acc[0].value() / denom,
                                                            acc[1].value() / denom};
    }
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto& acc = edge_acc[static_cast<std::size_t>(e)];
      const double denom =
          acc[0].value() + acc[1].value() + acc[2].value() + acc[3].value();
      for (int k = 0; k < 4; ++k)
        result.edge_marginals[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)] =
            acc[static_cast<std::size_t>(k)].value() / denom;
    }
  }
  return result;
}

ZeroFieldTransform to_zero_field(const IsingModel& model) {
  const auto& g = model.graph;
  const int n = g.node_count();
  const int aux = n;

  std::vector<std::pair<int, int>> edges = g.edges();
  for (int v = 0; v < n; ++v) edges.emplace_back(v, aux);
  Graph graph = Graph::from_edges(n + 1, edges);

  std::vector<double> couplings(static_cast<std::size_t>(graph.edge_count()), 0.0);
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto [a, b] = g.edge(e);
    couplings[static_cast<std::size_t>(graph.find_edge(a, b))] =
        model.couplings[static_cast<std::size_t>(e)];
  }
  for (int v = 0; v < n; ++v)
    couplings[static_cast<std::size_t>(graph.find_edge(v, aux))] =
        model.fields[static_cast<std::size_t>(v)];

  std::vector<double> fields(static_cast<std::size_t>(n + 1), 0.0);
  return {IsingModel::make(std::move(graph), std::move(couplings), std::move(fields)), aux};
}

} // namespace fracbp
