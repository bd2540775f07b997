#include "fracbp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "fracbp/numerics.hpp"

namespace fracbp {

double mutual_information(const BeliefSet& beliefs, const Graph& graph, int edge) {
  const auto [p, q] = graph.edge(edge);
  const auto& be = beliefs.edge[static_cast<std::size_t>(edge)];
  const auto& bp = beliefs.node[static_cast<std::size_t>(p)];
  const auto& bq = beliefs.node[static_cast<std::size_t>(q)];
  double info = 0.0;
  for (int k = 0; k < 4; ++k) info += xlogx(be[static_cast<std::size_t>(k)]);
  info -= xlogx(bp[0]) + xlogx(bp[1]);
  info -= xlogx(bq[0]) + xlogx(bq[1]);
  if (info < 0.0) {
    if (info < -1e-12)
      throw std::invalid_argument("mutual information negative beyond rounding");
    info = 0.0;
  }
  return info;
}

double free_energy_slope(const BeliefSet& beliefs, const Graph& graph,
                         const EdgeAppearance& appearance) {
  double slope = 0.0;
  for (int e = 0; e < graph.edge_count(); ++e)
    slope += (1.0 - appearance.rho[static_cast<std::size_t>(e)]) *
             mutual_information(beliefs, graph, e);
  return slope;
}

std::vector<double> lambda_grid(double start, double stop, double step) {
  if (!(start >= 0.0 && stop <= 1.0 && start <= stop && step > 0.0))
    throw std::invalid_argument("lambda grid must ascend within [0, 1]");
  std::vector<double> grid;
  const int count = static_cast<int>(std::floor((stop - start) / step + 0.5));
  for (int i = 0; i <= count; ++i) grid.push_back(std::min(start + i * step, stop));
  if (grid.back() < stop - 1e-12) grid.push_back(stop);
  return grid;
}

LambdaSweep sweep(const IsingModel& model, const EdgeAppearance& appearance,
                  const std::vector<double>& grid, const FbpOptions& options) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("lambda grid must be strictly ascending");
  if (!grid.empty() && !(grid.front() >= 0.0 && grid.back() <= 1.0))
    throw std::invalid_argument("lambda grid must lie in [0, 1]");

  LambdaSweep out;
  out.lambdas = grid;
  FbpOptions point_options = options;
  for (double lambda : grid) {
    const auto rho = rho_lambda(appearance, lambda);
    FbpResult result = run_fbp(model, rho, point_options);
    point_options.init = result.messages; // warm start the next grid point
    out.mutual_informations.push_back({});
    auto& infos = out.mutual_informations.back();
    for (int e = 0; e < model.graph.edge_count(); ++e)
      infos.push_back(mutual_information(result.beliefs, model.graph, e));
    double slope = 0.0;
    for (int e = 0; e < model.graph.edge_count(); ++e)
      slope += (1.0 - appearance.rho[static_cast<std::size_t>(e)]) *
               infos[static_cast<std::size_t>(e)];
    out.slope.push_back(slope);
    out.results.push_back(std::move(result));
  }

  // Curvature: centered differences of the analytic slope, one-sided at the
  // grid ends.
  const std::size_t n = grid.size();
  out.curvature.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (n < 2) break;
    if (i == 0)
      out.curvature[i] = (out.slope[1] - out.slope[0]) / (grid[1] - grid[0]);
    else if (i + 1 == n)
      out.curvature[i] = (out.slope[i] - out.slope[i - 1]) / (grid[i] - grid[i - 1]);
    else
      out.curvature[i] = (out.slope[i + 1] - out.slope[i - 1]) / (grid[i + 1] - grid[i - 1]);
  }

  double steepest = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double drop =
        std::abs(out.results[i].free_energy - out.results[i - 1].free_energy);
    if (drop > steepest) {
      steepest = drop;
      out.lambda_bar_index = static_cast<int>(i);
    }
  }
  return out;
}

LambdaStarResult find_lambda_star(const IsingModel& model,
                                  const EdgeAppearance& appearance,
                                  double log_z_exact, double tol_lambda,
                                  const FbpOptions& options) {
  constexpr double kGapTol = 1e-6;
  LambdaStarResult out;

  FbpOptions probe_options = options;
  auto gap_at = [&](double lambda) {
    const auto rho = rho_lambda(appearance, lambda);
    FbpResult result = run_fbp(model, rho, probe_options);
    probe_options.init = result.messages;
    if (!result.converged) out.solver_trouble = true;
    return result.log_z - log_z_exact;
  };

  out.gap_at_0 = gap_at(0.0);
  if (std::abs(out.gap_at_0) <= kGapTol) {
    // Flat or immediately satisfied: the left endpoint is the convention.
    out.found = true;
    out.lambda_star = 0.0;
    out.gap = out.gap_at_0;
    out.gap_at_1 = gap_at(1.0);
    return out;
  }
  out.gap_at_1 = gap_at(1.0);

  // log Z^(lambda) decreases in lambda, so a crossing needs gap(0) > 0
  // and gap(1) < 0; anything else is a no-crossing report.
  if (out.gap_at_0 < 0.0 || out.gap_at_1 > kGapTol) {
    if (std::abs(out.gap_at_1) <= kGapTol) {
      out.found = true;
      out.lambda_star = 1.0;
      out.gap = out.gap_at_1;
    }
    return out;
  }

  double lo = 0.0;
  double hi = 1.0;
  std::optional<double> hit; // leftmost point seen inside the gap tolerance
  double hit_gap = 0.0;
  while (hi - lo > tol_lambda) {
    const double mid = 0.5 * (lo + hi);
    const double gap = gap_at(mid);
    if (std::abs(gap) <= kGapTol) {
      if (!hit || mid < *hit) {
        hit = mid;
        hit_gap = gap;
      }
      hi = mid; // keep probing left: flat stretches return their left edge
    } else if (gap > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  if (hit) {
    out.found = true;
    out.lambda_star = *hit;
    out.gap = hit_gap;
  } else {
    const double mid = 0.5 * (lo + hi);
    const double gap = gap_at(mid);
    out.found = std::abs(gap) <= kGapTol;
    out.lambda_star = mid;
    out.gap = gap;
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const LambdaSweep& sweep_result) {
  out << "lambda,free_energy,log_z,dF_dlambda,d2F_dlambda2,converged,iterations\n";
  char buf[256];
  for (std::size_t i = 0; i < sweep_result.lambdas.size(); ++i) {
    const auto& r = sweep_result.results[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n",
                  sweep_result.lambdas[i], r.free_energy, r.log_z,
                  sweep_result.slope[i], sweep_result.curvature[i],
                  r.converged ? 1 : 0, r.iterations);
    out << buf;
  }
}

} // namespace fracbp
