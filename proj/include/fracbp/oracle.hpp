#pragma once

#include <array>
#include <vector>

#include "fracbp/model.hpp"

namespace fracbp {

/// Exact enumeration output. Marginals are indexed with spin -1 -> 0,
/// spin +1 -> 1; edge entries as [xa_index * 2 + xb_index].
struct ExactResult {
  double log_z = 0.0;
  std::vector<std::array<double, 2>> node_marginals;
  std::vector<std::array<double, 4>> edge_marginals;
};

/// Exact log Z and marginals by summing exp(Σ J x x + Σ h x) over all 2^N
/// states. Zero-field inputs take a half-space shortcut that also makes the
/// spin-flip symmetry of the marginals exact rather than rounded.
///
/// cap: refuse above this node count (default 20); hard ceiling 25 with a
/// stderr warning between the two.
ExactResult brute_force(const IsingModel& model, int cap = 20);

struct ZeroFieldTransform {
  IsingModel model; // one extra node, all fields zero
  int auxiliary_node = -1;
};

/// Fold the fields into couplings to one extra spin: J_{a*} = h_a, h := 0.
/// Satisfies log Z(J,h) = log Z*(J*,0) - log 2.
ZeroFieldTransform to_zero_field(const IsingModel& model);

} // namespace fracbp
