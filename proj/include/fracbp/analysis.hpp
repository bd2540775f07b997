#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracbp/fbp.hpp"
#include "fracbp/trw_weights.hpp"

namespace fracbp {

/// One lambda-grid scan: converged solver state, mutual informations, the
/// analytic free-energy slope and its finite-difference curvature at every
/// grid point. lambda_star is populated by locate_lambda_star / the CLI,
/// never by sweep itself.
struct LambdaSweep {
  std::vector<double> lambdas;
  std::vector<FbpResult> results;
  std::vector<std::vector<double>> mutual_informations; // per lambda, per edge
  std::vector<double> slope;      // d(free energy)/d(lambda), analytic
  std::vector<double> curvature;  // finite differences of slope
  std::optional<double> lambda_star;
  bool crossing_found = false;
  int lambda_bar_index = 0; // grid point of steepest free-energy change
};

/// Pairwise mutual information of an edge belief against its two node
/// marginals; clamped to zero when rounding drives it barely negative.
double mutual_information(const BeliefSet& beliefs, const Graph& graph, int edge);

/// Analytic slope of the free energy along lambda at a solver fixed point:
///   d F / d lambda = sum_edges (1 - rho_ab) * I_ab  >=  0,
/// with rho the lambda = 0 appearance probabilities. The free energy
/// F = -log Z^(lambda) rises with lambda as the estimate moves from the
/// tree-reweighted upper bound down to the Bethe value.
double free_energy_slope(const BeliefSet& beliefs, const Graph& graph,
                         const EdgeAppearance& appearance);

/// Solve at every grid lambda, warm-starting each point from the previous
/// fixed point. Non-convergence is flagged per point, never thrown.
LambdaSweep sweep(const IsingModel& model, const EdgeAppearance& appearance,
                  const std::vector<double>& grid, const FbpOptions& options = {});

struct LambdaStarResult {
  bool found = false;
  double lambda_star = 0.0;
  double gap = 0.0;          // log Z^(lambda*) - log_z_exact at the result
  double gap_at_0 = 0.0;
  double gap_at_1 = 0.0;
  bool solver_trouble = false; // some probe failed to converge
};

/// Bisection for the lambda where log Z^(lambda) crosses log_z_exact,
/// exploiting monotonicity. Within a flat |gap| <= 1e-6 region the left
/// endpoint is returned. Reports no crossing when both interval ends sit on
/// the same side.
LambdaStarResult find_lambda_star(const IsingModel& model,
                                  const EdgeAppearance& appearance,
                                  double log_z_exact, double tol_lambda = 1e-4,
                                  const FbpOptions& options = {});

/// Ascending uniform grid start..stop in the given step (inclusive ends).
std::vector<double> lambda_grid(double start = 0.0, double stop = 1.0,
                                double step = 0.05);

/// CSV columns: lambda, free_energy, log_z, dF_dlambda, d2F_dlambda2,
/// converged, iterations.
void write_sweep_csv(std::ostream& out, const LambdaSweep& sweep_result);

} // namespace fracbp
