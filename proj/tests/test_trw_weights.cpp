#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "fracbp/trw_weights.hpp"

using namespace fracbp;

namespace {

Graph k4_minus_edge() {
  // K4 without (2,3)
  return Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}});
}

Graph cycle4() { return Graph::from_edges(4, {{0, 1}, {0, 3}, {1, 2}, {2, 3}}); }

} // namespace

TEST_CASE("edge-uniform appearance probabilities") {
  CHECK(edge_uniform_rho(build_complete(4)).rho.front() == doctest::Approx(0.5));
  CHECK(edge_uniform_rho(k4_minus_edge()).rho.front() == doctest::Approx(0.6));
  CHECK(edge_uniform_rho(cycle4()).rho.front() == doctest::Approx(0.75));

  SUBCASE("sum rule") {
    for (const Graph& g : {build_grid(4), build_complete(6)}) {
      const auto appearance = edge_uniform_rho(g);
      double sum = 0.0;
      for (double r : appearance.rho) sum += r;
      CHECK(sum == doctest::Approx(g.node_count() - 1).epsilon(1e-13));
    }
  }

  SUBCASE("degree-one node rejected with advice") {
    auto path = Graph::from_edges(3, {{0, 1}, {1, 2}});
    CHECK_THROWS_WITH_AS(edge_uniform_rho(path),
                         doctest::Contains("tree-like branches"),
                         std::invalid_argument);
  }

  SUBCASE("disconnected graph rejected") {
    auto two_triangles = Graph::from_edges(
        6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});
    CHECK_THROWS_AS(edge_uniform_rho(two_triangles), std::invalid_argument);
  }
}

TEST_CASE("rho interpolation") {
  EdgeAppearance appearance;
  appearance.rho = {0.5};
  CHECK(rho_lambda(appearance, 0.0)[0] == 0.5);
  CHECK(rho_lambda(appearance, 1.0)[0] == 1.0);
  CHECK(rho_lambda(appearance, 0.5)[0] == 0.75);
  CHECK_THROWS_AS(rho_lambda(appearance, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(rho_lambda(appearance, 1.1), std::invalid_argument);

  SUBCASE("monotone in lambda, one at the top") {
    appearance.rho = {0.25, 0.6, 1.0};
    double prev[3] = {0.0, 0.0, 0.0};
    for (double lambda = 0.0; lambda <= 1.0; lambda += 0.1) {
      const auto r = rho_lambda(appearance, std::min(lambda, 1.0));
      for (int e = 0; e < 3; ++e) {
        CHECK(r[e] >= prev[e]);
        prev[e] = r[e];
      }
    }
    const auto top = rho_lambda(appearance, 1.0);
    for (double r : top) CHECK(r == 1.0);
  }
}

TEST_CASE("K4 certificate matches the worked example") {
  const auto g = build_complete(4);
  const auto set = build_edge_uniform_certificate(g, {});
  CHECK(set.trees.size() == 6);
  const auto report = validate_tree_set(g, set);
  CHECK(report.ok());
  for (int count : report.edge_counts) CHECK(count == 3);
  for (double rho : report.induced_rho) CHECK(rho == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("one elimination: K4 minus an edge") {
  const auto g = k4_minus_edge();
  // (2,3) is id 5 in the canonical K4 edge table
  const auto set = build_edge_uniform_certificate(g, {5});
  CHECK(set.trees.size() == 5);
  const auto report = validate_tree_set(g, set);
  CHECK(report.ok());
  for (int count : report.edge_counts) CHECK(count == 3);
  for (double rho : report.induced_rho) CHECK(rho == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("two eliminations: the 4-cycle") {
  const auto g = cycle4();
  const auto set = build_edge_uniform_certificate(g); // derives the order
  CHECK(set.trees.size() == 4);
  const auto report = validate_tree_set(g, set);
  CHECK(report.ok());
  for (int count : report.edge_counts) CHECK(count == 3);
  for (double rho : report.induced_rho) CHECK(rho == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("complete-graph certificates validate for N = 3..9") {
  for (int n = 3; n <= 9; ++n) {
    const auto g = build_complete(n);
    const auto set = build_edge_uniform_certificate(g, {});
    CHECK(static_cast<int>(set.trees.size()) == g.edge_count());
    const auto report = validate_tree_set(g, set);
    CHECK(report.ok());
    for (int count : report.edge_counts) CHECK(count == n - 1);
  }
}

TEST_CASE("deeper elimination chains stay uniform") {
  // Strip K6 down to a sparse degree->=2 graph, one edge at a time.
  auto g = Graph::from_edges(
      6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}, {0, 3}, {1, 4}});
  const auto set = build_edge_uniform_certificate(g);
  const auto report = validate_tree_set(g, set);
  CHECK(report.ok());
  CHECK(static_cast<int>(set.trees.size()) == g.edge_count());
  for (int count : report.edge_counts) CHECK(count == 5);
}

TEST_CASE("certificate-backed appearance stores the induced rho") {
  const auto g = build_complete(5);
  auto appearance = appearance_from_certificate(g, build_edge_uniform_certificate(g, {}));
  CHECK(appearance.certificate.has_value());
  const auto report = validate_tree_set(g, *appearance.certificate);
  for (std::size_t e = 0; e < appearance.rho.size(); ++e)
    CHECK(appearance.rho[e] == report.induced_rho[e]); // bit-exact by construction
}

TEST_CASE("validator diagnostics") {
  const auto g = build_complete(4);
  auto set = build_edge_uniform_certificate(g, {});

  SUBCASE("valid set: no violations") { CHECK(validate_tree_set(g, set).ok()); }

  SUBCASE("a tree that is not spanning") {
    set.trees[0][1] = set.trees[0][0]; // duplicate edge id
    auto report = validate_tree_set(g, set);
    CHECK(!report.ok());

    set = build_edge_uniform_certificate(g, {});
    set.trees[2].pop_back(); // too few edges
    report = validate_tree_set(g, set);
    bool found = false;
    for (const auto& v : report.violations)
      found = found || v.find("not spanning") != std::string::npos;
    CHECK(found);
  }

  SUBCASE("weights that do not sum to one") {
    for (auto& w : set.weights) w *= 0.9;
    const auto report = validate_tree_set(g, set);
    bool found = false;
    for (const auto& v : report.violations)
      found = found || v.find("weights not normalized") != std::string::npos;
    CHECK(found);
  }
}

TEST_CASE("certificate files round-trip") {
  const auto g = k4_minus_edge();
  const auto set = build_edge_uniform_certificate(g);

  std::stringstream buffer;
  write_certificate(buffer, g, set);
  const auto [g2, set2] = read_certificate(buffer);

  CHECK(g2.edges() == g.edges());
  CHECK(set2.trees == set.trees);
  CHECK(set2.weights == set.weights);
  CHECK(validate_tree_set(g2, set2).ok());
}
