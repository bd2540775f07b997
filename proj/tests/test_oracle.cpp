#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracbp/model.hpp"
#include "fracbp/oracle.hpp"
#include "fracbp/rng.hpp"

using namespace fracbp;

namespace {

// Independent reference: direct sum of exp(ΣJxx + Σhx) over all states,
// no log-domain tricks, no shared code with the library enumeration.
double naive_log_z(const IsingModel& model) {
  const int n = model.graph.node_count();
  double z = 0.0;
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    double arg = 0.0;
    for (int e = 0; e < model.graph.edge_count(); ++e) {
      const auto [a, b] = model.graph.edge(e);
      const int xa = (mask >> a) & 1 ? 1 : -1;
      const int xb = (mask >> b) & 1 ? 1 : -1;
      arg += model.couplings[e] * xa * xb;
    }
    for (int v = 0; v < n; ++v)
      arg += model.fields[v] * ((mask >> v) & 1 ? 1 : -1);
    z += std::exp(arg);
  }
  return std::log(z);
}

IsingModel random_model(const Graph& g, std::uint64_t seed, bool with_fields) {
  SplitMix64 jr = SplitMix64::substream(seed, 100);
  SplitMix64 hr = SplitMix64::substream(seed, 101);
  std::vector<double> j(g.edge_count());
  std::vector<double> h(g.node_count(), 0.0);
  for (auto& v : j) v = jr.next_double();
  if (with_fields)
    for (auto& v : h) v = hr.next_double();
  return IsingModel::make(g, std::move(j), std::move(h));
}

} // namespace

TEST_CASE("single edge closed form") {
  auto g = Graph::from_edges(2, {{0, 1}});
  auto m = IsingModel::make(g, {1.0}, {0.0, 0.0});
  const auto exact = brute_force(m);
  CHECK(exact.log_z == doctest::Approx(std::log(4.0 * std::cosh(1.0))).epsilon(1e-14));
}

TEST_CASE("zero couplings give N log 2") {
  auto m = IsingModel::make(build_grid(3), std::vector<double>(12, 0.0),
                            std::vector<double>(9, 0.0));
  CHECK(brute_force(m).log_z == doctest::Approx(9.0 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("triangle with unit couplings: Z = 2e^3 + 6e^-1") {
  auto m = IsingModel::make(build_complete(3), {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0});
  CHECK(brute_force(m).log_z ==
        doctest::Approx(std::log(2.0 * std::exp(3.0) + 6.0 * std::exp(-1.0)))
            .epsilon(1e-14));
}

TEST_CASE("matches the naive enumerator on random instances") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    auto m = random_model(build_grid(3), seed, true);
    CHECK(brute_force(m).log_z == doctest::Approx(naive_log_z(m)).epsilon(1e-12));
  }
  auto k5 = random_model(build_complete(5), 9, true);
  CHECK(brute_force(k5).log_z == doctest::Approx(naive_log_z(k5)).epsilon(1e-12));
}

TEST_CASE("marginals are locally consistent to machine precision") {
  auto m = random_model(build_grid(3), 4, true);
  const auto exact = brute_force(m);
  for (int e = 0; e < m.graph.edge_count(); ++e) {
    const auto [p, q] = m.graph.edge(e);
    const auto& be = exact.edge_marginals[e];
    for (int i = 0; i < 2; ++i) {
      CHECK(be[i * 2] + be[i * 2 + 1] ==
            doctest::Approx(exact.node_marginals[p][i]).epsilon(1e-13));
      CHECK(be[i] + be[2 + i] ==
            doctest::Approx(exact.node_marginals[q][i]).epsilon(1e-13));
    }
    double total = be[0] + be[1] + be[2] + be[3];
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("zero-field marginals are exactly one half") {
  auto m = random_model(build_grid(3), 5, false);
  const auto exact = brute_force(m);
  for (const auto& bn : exact.node_marginals) {
    CHECK(bn[0] == 0.5);
    CHECK(bn[1] == 0.5);
  }
  for (const auto& be : exact.edge_marginals) {
    CHECK(be[0] == be[3]); // flip symmetry, exact
    CHECK(be[1] == be[2]);
  }
}

TEST_CASE("enumeration caps are enforced") {
  auto m = IsingModel::make(build_complete(6), std::vector<double>(15, 0.1),
                            std::vector<double>(6, 0.0));
  CHECK_THROWS_AS(brute_force(m, 5), std::invalid_argument);
}

TEST_CASE("zero-field transform identity") {
  SUBCASE("single spin with a field") {
    auto g = Graph::from_edges(1, {});
    // A lone node has no edges; couple it through the transform instead.
    auto m = IsingModel::make(g, {}, {0.7});
    const auto transformed = to_zero_field(m);
    CHECK(transformed.auxiliary_node == 1);
    CHECK(transformed.model.graph.edge_count() == 1);
    const double log_z_star = brute_force(transformed.model).log_z;
    CHECK(log_z_star ==
          doctest::Approx(std::log(4.0 * std::cosh(0.7))).epsilon(1e-14));
    CHECK(log_z_star - std::log(2.0) ==
          doctest::Approx(std::log(2.0 * std::cosh(0.7))).epsilon(1e-14));
  }

  SUBCASE("zero-field input decouples the auxiliary spin") {
    auto m = random_model(build_grid(2), 6, false);
    const auto transformed = to_zero_field(m);
    for (int v = 0; v < 4; ++v) {
      const int e = transformed.model.graph.find_edge(v, transformed.auxiliary_node);
      CHECK(transformed.model.couplings[e] == 0.0);
    }
    CHECK(brute_force(transformed.model).log_z ==
          doctest::Approx(brute_force(m).log_z + std::log(2.0)).epsilon(1e-13));
  }

  SUBCASE("seeded instances satisfy log Z = log Z* - log 2 to 1e-12") {
    for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
      auto m = random_model(build_complete(3), seed, true);
      const auto transformed = to_zero_field(m);
      const double lhs = brute_force(m).log_z;
      const double rhs = brute_force(transformed.model).log_z - std::log(2.0);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
    }
  }
}
