#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fracbp/fbp.hpp"

namespace fracbp {

/// Monte Carlo estimate of the multiplicative partition-function correction.
/// log_mean is log of the sample mean of the weights; std_error_log is the
/// delta-method standard error of that log. The trace records the running
/// estimate at batch boundaries.
struct CorrectionEstimate {
  double log_mean = 0.0;
  double std_error_log = 0.0;
  std::int64_t samples = 0;
  bool all_zero_weights = false;
  std::vector<std::pair<std::int64_t, double>> trace; // (samples, running log mean)
};

/// Log of the sampling weight at one state under the product distribution of
/// node beliefs:
///   sum_edges rho_ab log B_ab(x_a, x_b) - sum_nodes (sum_c rho_ac) log B_a(x_a).
/// A zero edge belief at the state yields -inf (legal, weight zero); a zero
/// node belief is a degenerate marginal and throws.
double log_weight(const IsingModel& model, const std::vector<double>& rho_lam,
                  const BeliefSet& beliefs, const std::vector<int>& state);

/// Exact log of the correction by enumerating all 2^N states
/// (node_count <= cap). Equals log Z - log Z^(lambda) at a solver fixed
/// point.
double exact_correction(const IsingModel& model, const std::vector<double>& rho_lam,
                        const BeliefSet& beliefs, int cap = 20);

/// i.i.d. sampling from the product of node beliefs. Batches of 1024 draw
/// from substream(seed, batch_index) and merge in batch order, so the result
/// is one fixed function of (seed, num_samples).
CorrectionEstimate estimate_correction(const IsingModel& model,
                                       const std::vector<double>& rho_lam,
                                       const BeliefSet& beliefs,
                                       std::int64_t num_samples, std::uint64_t seed);

} // namespace fracbp
