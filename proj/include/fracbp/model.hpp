#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracbp/graph.hpp"

namespace fracbp {

/// Pairwise binary model: p(x) ∝ exp(Σ J_ab x_a x_b + Σ h_a x_a), x ∈ {-1,+1}.
/// Immutable after construction; safe to share across threads.
struct IsingModel {
  Graph graph;
  std::vector<double> couplings; // J per edge, graph edge order
  std::vector<double> fields;    // h per node

  /// Validates lengths and finiteness.
  static IsingModel make(Graph graph, std::vector<double> couplings,
                         std::vector<double> fields);
};

enum class Topology { Grid, Complete };
enum class CouplingDist { AttractiveUnit, MixedUnit };      // U(0,1) / U(-1,1)
enum class FieldDist { Zero, MixedUnit, PositiveUnit };      // 0 / U(-1,1) / U(0,1)

/// Random-instance recipe. A spec plus its seed identifies one instance
/// bit-exactly: couplings come from substream(seed, 0) in edge order, fields
/// from substream(seed, 1) in node order.
struct EnsembleSpec {
  Topology topology = Topology::Grid;
  int size = 3; // grid side or complete-graph order
  CouplingDist coupling_dist = CouplingDist::AttractiveUnit;
  FieldDist field_dist = FieldDist::Zero;
  std::uint64_t seed = 0;
};

IsingModel sample_instance(const EnsembleSpec& spec);

/// Per-edge energy with the field split evenly between the two endpoints:
///   E_ab = -J_ab x_a x_b - (h_a x_a + h_b x_b) / 2.
/// Summed over edges this equals the model energy only on 2-regular graphs;
/// see total_energy for the global form used everywhere a single number for
/// the whole state is needed.
double edge_energy(const IsingModel& model, int edge, int xa, int xb);

/// Global energy E(x) = -Σ J_ab x_a x_b - Σ h_a x_a.
double total_energy(const IsingModel& model, const std::vector<int>& state);

/// Σ over edges of edge_energy (the degree/2-weighted-field form).
double total_edge_energy(const IsingModel& model, const std::vector<int>& state);

/// Line-oriented text format, lossless round-trip (hex floats):
///   ising <node_count> <edge_count>
///   node <id> <h>
///   edge <a> <b> <J>
void write_model(std::ostream& out, const IsingModel& model);
IsingModel read_model(std::istream& in);
void save_model(const std::string& path, const IsingModel& model);
IsingModel load_model(const std::string& path);

} // namespace fracbp
