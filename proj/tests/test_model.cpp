#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fracbp/model.hpp"
#include "fracbp/rng.hpp"

using namespace fracbp;

TEST_CASE("grid sizes and edge counts") {
  CHECK(build_grid(3).node_count() == 9);
  CHECK(build_grid(3).edge_count() == 12);
  CHECK(build_grid(2).node_count() == 4);
  CHECK(build_grid(2).edge_count() == 4);
  CHECK(build_grid(10).node_count() == 100);
  CHECK(build_grid(10).edge_count() == 180);
  CHECK_THROWS_AS(build_grid(1), std::invalid_argument);
}

TEST_CASE("complete graph edge counts") {
  CHECK(build_complete(4).edge_count() == 6);
  CHECK(build_complete(9).edge_count() == 36);
  CHECK(build_complete(3).edge_count() == 3);
  CHECK_THROWS_AS(build_complete(2), std::invalid_argument);
}

TEST_CASE("adjacency mirrors the edge list") {
  for (const Graph& g : {build_grid(4), build_complete(5)}) {
    int incident_total = 0;
    for (int v = 0; v < g.node_count(); ++v) {
      for (const auto& inc : g.incident(v)) {
        const auto [a, b] = g.edge(inc.edge);
        CHECK(((a == v && b == inc.neighbor) || (b == v && a == inc.neighbor)));
      }
      incident_total += g.degree(v);
    }
    CHECK(incident_total == 2 * g.edge_count()); // each edge in two lists
  }
}

TEST_CASE("graph invariants are enforced") {
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 3}}), std::invalid_argument);
}

TEST_CASE("ensemble sampling") {
  SUBCASE("attractive zero-field ranges") {
    EnsembleSpec spec{Topology::Grid, 3, CouplingDist::AttractiveUnit, FieldDist::Zero, 1};
    const auto m = sample_instance(spec);
    for (double j : m.couplings) {
      CHECK(j >= 0.0);
      CHECK(j < 1.0);
    }
    for (double h : m.fields) CHECK(h == 0.0);
  }

  SUBCASE("complete-graph positive fields in range") {
    EnsembleSpec spec{Topology::Complete, 9, CouplingDist::AttractiveUnit,
                      FieldDist::PositiveUnit, 7};
    const auto m = sample_instance(spec);
    CHECK(m.graph.edge_count() == 36);
    for (double j : m.couplings) {
      CHECK(j >= 0.0);
      CHECK(j < 1.0);
    }
    for (double h : m.fields) {
      CHECK(h >= 0.0);
      CHECK(h < 1.0);
    }
  }

  SUBCASE("same seed, same instance, bit-exactly") {
    EnsembleSpec spec{Topology::Grid, 4, CouplingDist::MixedUnit, FieldDist::MixedUnit, 42};
    const auto a = sample_instance(spec);
    const auto b = sample_instance(spec);
    CHECK(a.couplings == b.couplings);
    CHECK(a.fields == b.fields);
  }
}

TEST_CASE("edge energy") {
  auto g = Graph::from_edges(2, {{0, 1}});

  SUBCASE("pure coupling") {
    auto m = IsingModel::make(g, {1.0}, {0.0, 0.0});
    CHECK(edge_energy(m, 0, 1, 1) == -1.0);
  }
  SUBCASE("field halving") {
    auto m = IsingModel::make(g, {0.0}, {2.0, 0.0});
    CHECK(edge_energy(m, 0, 1, 1) == -1.0);
    CHECK(edge_energy(m, 0, 1, -1) == -1.0);
  }
  SUBCASE("invalid edge id") {
    auto m = IsingModel::make(g, {0.0}, {0.0, 0.0});
    CHECK_THROWS_AS(edge_energy(m, 1, 1, 1), std::invalid_argument);
  }
}

TEST_CASE("edge energies assemble the per-edge total") {
  // Random triangle: every node has degree 2, so the halved-field edge sum
  // also equals the global energy there.
  SplitMix64 rng(17);
  auto g = build_complete(3);
  std::vector<double> j{rng.next_double(), rng.next_double(), rng.next_double()};
  std::vector<double> h{rng.next_double(), rng.next_double(), rng.next_double()};
  auto m = IsingModel::make(g, j, h);

  for (int mask = 0; mask < 8; ++mask) {
    std::vector<int> state;
    for (int v = 0; v < 3; ++v) state.push_back((mask >> v) & 1 ? 1 : -1);
    double direct = 0.0;
    for (int e = 0; e < 3; ++e) {
      const auto [a, b] = g.edge(e);
      direct += edge_energy(m, e, state[a], state[b]);
    }
    CHECK(total_edge_energy(m, state) == doctest::Approx(direct).epsilon(1e-15));
    CHECK(total_edge_energy(m, state) ==
          doctest::Approx(total_energy(m, state)).epsilon(1e-14));
  }
}

TEST_CASE("model files round-trip losslessly") {
  EnsembleSpec spec{Topology::Grid, 3, CouplingDist::MixedUnit, FieldDist::MixedUnit, 99};
  const auto m = sample_instance(spec);

  std::stringstream buffer;
  write_model(buffer, m);
  const auto back = read_model(buffer);

  CHECK(back.graph.node_count() == m.graph.node_count());
  CHECK(back.graph.edges() == m.graph.edges());
  CHECK(back.couplings == m.couplings); // bit-exact via hex floats
  CHECK(back.fields == m.fields);
}

TEST_CASE("substreams are independent of draw order") {
  SplitMix64 a = SplitMix64::substream(5, 0);
  SplitMix64 b = SplitMix64::substream(5, 1);
  const double a0 = a.next_double();
  SplitMix64 b2 = SplitMix64::substream(5, 1);
  CHECK(b.next_double() == b2.next_double());
  SplitMix64 a2 = SplitMix64::substream(5, 0);
  CHECK(a0 == a2.next_double());
}
