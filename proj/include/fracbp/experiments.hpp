#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracbp/analysis.hpp"
#include "fracbp/correction.hpp"
#include "fracbp/model.hpp"

namespace fracbp {

/// Exit contract shared by every subcommand: 0 clean, 1 usage error,
/// 2 flagged numerical issues (non-convergence, no crossing, failed checks).
enum class ExitStatus : int { Clean = 0, Usage = 1, Flagged = 2 };

struct ExperimentConfig {
  // instance
  Topology topology = Topology::Grid;
  int size = 3;
  CouplingDist coupling_dist = CouplingDist::AttractiveUnit;
  FieldDist field_dist = FieldDist::Zero;
  std::uint64_t seed = 1;
  std::string model_in;  // when set, load this model instead of sampling
  std::string model_out; // when set, save the instance here

  // lambda grid
  double lambda_start = 0.0;
  double lambda_stop = 1.0;
  double lambda_step = 0.05;

  FbpOptions fbp;

  // sampling and enumeration
  std::int64_t num_samples = 100000;
  int enumeration_cap = 20;

  // concentration protocol
  std::vector<int> sizes = {6, 8, 10};
  int instances = 4;

  // validate-trees
  std::string certificate_file; // when set, validate this file instead of K_size
};

/// Echoed at the top of every CSV so each artifact regenerates from itself.
void write_config_comment(std::ostream& out, const std::string& command,
                          const ExperimentConfig& config);

/// Lambda scan of one instance: per-lambda log Z^(lambda), the correction
/// (exact below the enumeration cap, sampled above), slope and curvature;
/// footer records brute-force log Z and lambda_star where available.
ExitStatus cmd_sweep(const ExperimentConfig& config, std::ostream& out);

/// Locates lambda_star for one instance, via the enumeration oracle below
/// the cap and via the corrected sampling estimate at lambda = 0.5 above it.
ExitStatus cmd_lambda_star(const ExperimentConfig& config, std::ostream& out);

/// lambda_star for `instances` seeded instances at each grid size, with
/// per-size spread statistics and the spread * sqrt(N) trend column.
ExitStatus cmd_concentration(const ExperimentConfig& config, std::ostream& out);

/// Running correction estimates on a geometric sample schedule, with a
/// 3-sigma agreement flag against the exact correction when enumerable.
ExitStatus cmd_mc_convergence(const ExperimentConfig& config, std::ostream& out);

/// Crossing / no-crossing verdict for seeded mixed instances against the
/// brute-force partition function.
ExitStatus cmd_mixed(const ExperimentConfig& config, std::ostream& out);

/// Builds (or loads) an edge-uniform certificate and reports per-edge
/// appearance counts and any violations.
ExitStatus cmd_validate_trees(const ExperimentConfig& config, std::ostream& out);

} // namespace fracbp
