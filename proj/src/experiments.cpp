#include "fracbp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fracbp/oracle.hpp"

namespace fracbp {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* topology_name(Topology t) {
  return t == Topology::Grid ? "grid" : "complete";
}
const char* coupling_name(CouplingDist c) {
  return c == CouplingDist::AttractiveUnit ? "attractive" : "mixed";
}
const char* field_name(FieldDist f) {
  switch (f) {
    case FieldDist::Zero: return "zero";
    case FieldDist::MixedUnit: return "sym";
    case FieldDist::PositiveUnit: return "pos";
  }
  return "?";
}

IsingModel instance_from_config(const ExperimentConfig& config, std::uint64_t seed) {
  if (!config.model_in.empty()) return load_model(config.model_in);
  EnsembleSpec spec{config.topology, config.size, config.coupling_dist,
                    config.field_dist, seed};
  IsingModel model = sample_instance(spec);
  if (!config.model_out.empty()) save_model(config.model_out, model);
  return model;
}

int node_count_of(const ExperimentConfig& config, int size) {
  return config.topology == Topology::Grid ? size * size : size;
}

// log Z reference: enumeration below the cap, otherwise the corrected
// sampling estimate log Z^(0.5) + log correction at lambda 0.5.
struct LogZReference {
  double value = 0.0;
  std::string route;
  bool trouble = false;
};

LogZReference log_z_reference(const IsingModel& model, const EdgeAppearance& appearance,
                              const ExperimentConfig& config, std::uint64_t mc_seed) {
  LogZReference ref;
  if (model.graph.node_count() <= config.enumeration_cap) {
    ref.value = brute_force(model, config.enumeration_cap).log_z;
    ref.route = "oracle";
    return ref;
  }
  const auto rho = rho_lambda(appearance, 0.5);
  const FbpResult fixed_point = run_fbp(model, rho, config.fbp);
  ref.trouble = !fixed_point.converged;
  const CorrectionEstimate estimate = estimate_correction(
      model, rho, fixed_point.beliefs, config.num_samples, mc_seed);
  ref.value = fixed_point.log_z + estimate.log_mean;
  ref.route = "corrected-mc";
  return ref;
}

} // namespace

void write_config_comment(std::ostream& out, const std::string& command,
                          const ExperimentConfig& config) {
  out << "# fracbp " << command << '\n';
  out << "# topology = " << topology_name(config.topology) << '\n';
  out << "# size = " << config.size << '\n';
  out << "# coupling = " << coupling_name(config.coupling_dist) << '\n';
  out << "# field = " << field_name(config.field_dist) << '\n';
  out << "# seed = " << config.seed << '\n';
  if (!config.model_in.empty()) out << "# model_in = " << config.model_in << '\n';
  out << "# lambda_grid = " << fmt(config.lambda_start) << ':' << fmt(config.lambda_step)
      << ':' << fmt(config.lambda_stop) << '\n';
  out << "# fbp = max_iters " << config.fbp.max_iters << ", tol " << fmt(config.fbp.tol)
      << ", damping " << fmt(config.fbp.damping) << ", schedule "
      << (config.fbp.schedule == Schedule::Sequential ? "sequential" : "parallel")
      << '\n';
  out << "# num_samples = " << config.num_samples << '\n';
  out << "# enumeration_cap = " << config.enumeration_cap << '\n';
}

ExitStatus cmd_sweep(const ExperimentConfig& config, std::ostream& out) {
  const IsingModel model = instance_from_config(config, config.seed);
  const EdgeAppearance appearance = edge_uniform_rho(model.graph);
  const auto grid = lambda_grid(config.lambda_start, config.lambda_stop,
                                config.lambda_step);
  const bool enumerable = model.graph.node_count() <= config.enumeration_cap;

  write_config_comment(out, "sweep", config);
  const LambdaSweep scan = sweep(model, appearance, grid, config.fbp);

  bool any_unconverged = false;
  out << "lambda,log_z_lambda,log_correction,correction_route,dF_dlambda,"
         "d2F_dlambda2,converged,iterations\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const FbpResult& r = scan.results[i];
    any_unconverged = any_unconverged || !r.converged;
    const auto rho = rho_lambda(appearance, grid[i]);
    double log_corr = 0.0;
    const char* route = "";
    if (enumerable) {
      log_corr = exact_correction(model, rho, r.beliefs, config.enumeration_cap);
      route = "exact";
    } else {
      log_corr = estimate_correction(model, rho, r.beliefs, config.num_samples,
                                     config.seed)
                     .log_mean;
      route = "mc";
    }
    out << fmt(grid[i]) << ',' << fmt(r.log_z) << ',' << fmt(log_corr) << ',' << route
        << ',' << fmt(scan.slope[i]) << ',' << fmt(scan.curvature[i]) << ','
        << (r.converged ? 1 : 0) << ',' << r.iterations << '\n';
  }

  const LogZReference ref = log_z_reference(model, appearance, config, config.seed);
  out << "# log_z_reference = " << fmt(ref.value) << " (" << ref.route << ")\n";
  const LambdaStarResult star =
      find_lambda_star(model, appearance, ref.value, 1e-4, config.fbp);
  if (star.found)
    out << "# lambda_star = " << fmt(star.lambda_star) << " gap " << fmt(star.gap)
        << '\n';
  else
    out << "# lambda_star = none (gap_at_0 " << fmt(star.gap_at_0) << ", gap_at_1 "
        << fmt(star.gap_at_1) << ")\n";

  const bool flagged =
      any_unconverged || star.solver_trouble || ref.trouble || !star.found;
  return flagged ? ExitStatus::Flagged : ExitStatus::Clean;
}

ExitStatus cmd_lambda_star(const ExperimentConfig& config, std::ostream& out) {
  const IsingModel model = instance_from_config(config, config.seed);
  const EdgeAppearance appearance = edge_uniform_rho(model.graph);

  write_config_comment(out, "lambda-star", config);
  const LogZReference ref = log_z_reference(model, appearance, config, config.seed);
  const LambdaStarResult star =
      find_lambda_star(model, appearance, ref.value, 1e-4, config.fbp);

  out << "found,lambda_star,gap,gap_at_0,gap_at_1,log_z_reference,route\n";
  out << (star.found ? 1 : 0) << ',' << (star.found ? fmt(star.lambda_star) : "") << ','
      << fmt(star.gap) << ',' << fmt(star.gap_at_0) << ',' << fmt(star.gap_at_1) << ','
      << fmt(ref.value) << ',' << ref.route << '\n';

  return star.found && !star.solver_trouble && !ref.trouble ? ExitStatus::Clean
                                                            : ExitStatus::Flagged;
}

ExitStatus cmd_concentration(const ExperimentConfig& config, std::ostream& out) {
  write_config_comment(out, "concentration", config);
  out << "kind,size,instance,seed,route,found,lambda_star,gap,spread,spread_sqrt_n\n";

  bool flagged = false;
  for (int size : config.sizes) {
    std::vector<double> stars;
    for (int i = 0; i < config.instances; ++i) {
      const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(i);
      ExperimentConfig local = config;
      local.size = size;
      local.model_in.clear();
      local.model_out.clear();
      const IsingModel model = instance_from_config(local, seed);
      const EdgeAppearance appearance = edge_uniform_rho(model.graph);
      const LogZReference ref = log_z_reference(model, appearance, local, seed);
      const LambdaStarResult star =
          find_lambda_star(model, appearance, ref.value, 1e-4, local.fbp);
      flagged = flagged || !star.found || star.solver_trouble || ref.trouble;
      out << "instance," << size << ',' << i << ',' << seed << ',' << ref.route << ','
          << (star.found ? 1 : 0) << ','
          << (star.found ? fmt(star.lambda_star) : "") << ',' << fmt(star.gap)
          << ",,\n";
      if (star.found) stars.push_back(star.lambda_star);
    }
    double spread = 0.0;
    if (stars.size() > 1) {
      const auto [lo, hi] = std::minmax_element(stars.begin(), stars.end());
      spread = *hi - *lo;
    }
    const double n = node_count_of(config, size);
    out << "summary," << size << ",,,," << stars.size() << ",,," << fmt(spread) << ','
        << fmt(spread * std::sqrt(n)) << '\n';
  }
  return flagged ? ExitStatus::Flagged : ExitStatus::Clean;
}

ExitStatus cmd_mc_convergence(const ExperimentConfig& config, std::ostream& out) {
  const IsingModel model = instance_from_config(config, config.seed);
  const EdgeAppearance appearance = edge_uniform_rho(model.graph);
  const auto grid = lambda_grid(config.lambda_start, config.lambda_stop,
                                config.lambda_step);
  const bool enumerable = model.graph.node_count() <= config.enumeration_cap;

  write_config_comment(out, "mc-convergence", config);
  out << "lambda,samples,running_log_mean,std_error,exact_log_correction,"
         "three_sigma_ok\n";

  bool flagged = false;
  FbpOptions options = config.fbp;
  for (double lambda : grid) {
    const auto rho = rho_lambda(appearance, lambda);
    const FbpResult fixed_point = run_fbp(model, rho, options);
    options.init = fixed_point.messages;
    flagged = flagged || !fixed_point.converged;

    double exact = 0.0;
    if (enumerable)
      exact = exact_correction(model, rho, fixed_point.beliefs, config.enumeration_cap);

    // Geometric schedule; the batch substreams make every shorter run a
    // bit-exact prefix of the full one.
    std::vector<std::int64_t> schedule;
    for (std::int64_t c = 1024; c < config.num_samples; c *= 2) schedule.push_back(c);
    schedule.push_back(config.num_samples);
    for (std::int64_t count : schedule) {
      const CorrectionEstimate est = estimate_correction(
          model, rho, fixed_point.beliefs, count, config.seed);
      const bool final_row = count == config.num_samples;
      out << fmt(lambda) << ',' << count << ',' << fmt(est.log_mean) << ','
          << fmt(est.std_error_log) << ',';
      if (enumerable && final_row) {
        const bool ok = std::abs(est.log_mean - exact) <= 3.0 * est.std_error_log;
        flagged = flagged || !ok;
        out << fmt(exact) << ',' << (ok ? 1 : 0) << '\n';
      } else {
        out << ",\n";
      }
    }
  }
  return flagged ? ExitStatus::Flagged : ExitStatus::Clean;
}

ExitStatus cmd_mixed(const ExperimentConfig& config, std::ostream& out) {
  write_config_comment(out, "mixed", config);
  out << "kind,instance,seed,lambda,log_z_lambda,converged,log_z_exact,lambda_star,"
         "gap,verdict,consistent\n";

  const auto grid = lambda_grid(config.lambda_start, config.lambda_stop,
                                config.lambda_step);
  bool flagged = false;
  for (int i = 0; i < config.instances; ++i) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(i);
    ExperimentConfig local = config;
    local.model_in.clear();
    local.model_out.clear();
    const IsingModel model = instance_from_config(local, seed);
    if (model.graph.node_count() > config.enumeration_cap) return ExitStatus::Usage;
    const EdgeAppearance appearance = edge_uniform_rho(model.graph);
    const double log_z_exact = brute_force(model, config.enumeration_cap).log_z;

    const LambdaSweep scan = sweep(model, appearance, grid, config.fbp);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      flagged = flagged || !scan.results[k].converged;
      out << "sweep," << i << ',' << seed << ',' << fmt(grid[k]) << ','
          << fmt(scan.results[k].log_z) << ',' << (scan.results[k].converged ? 1 : 0)
          << ",,,,,\n";
    }

    const LambdaStarResult star =
        find_lambda_star(model, appearance, log_z_exact, 1e-4, config.fbp);
    bool consistent = false;
    const char* verdict = "";
    if (star.found) {
      verdict = "crossing";
      consistent = std::abs(star.gap) <= 1e-6;
    } else {
      verdict = "no-crossing";
      // With the upper bound at lambda 0, a missing crossing means the
      // Bethe end already overshoots the exact value.
      consistent = star.gap_at_1 > 0.0 && star.gap_at_0 > 0.0;
    }
    flagged = flagged || !consistent || star.solver_trouble;
    out << "verdict," << i << ',' << seed << ",,,," << fmt(log_z_exact) << ','
        << (star.found ? fmt(star.lambda_star) : "") << ',' << fmt(star.gap) << ','
        << verdict << ',' << (consistent ? 1 : 0) << '\n';
  }
  return flagged ? ExitStatus::Flagged : ExitStatus::Clean;
}

ExitStatus cmd_validate_trees(const ExperimentConfig& config, std::ostream& out) {
  Graph graph;
  SpanningTreeSet set;
  if (!config.certificate_file.empty()) {
    std::ifstream in(config.certificate_file);
    if (!in) {
      out << "cannot open certificate file: " << config.certificate_file << '\n';
      return ExitStatus::Usage;
    }
    auto loaded = read_certificate(in);
    graph = std::move(loaded.first);
    set = std::move(loaded.second);
  } else {
    graph = build_complete(config.size);
    set = build_edge_uniform_certificate(graph);
  }

  write_config_comment(out, "validate-trees", config);
  const TreeSetReport report = validate_tree_set(graph, set);
  out << "trees " << set.trees.size() << ", nodes " << graph.node_count() << ", edges "
      << graph.edge_count() << '\n';
  for (int e = 0; e < graph.edge_count(); ++e)
    out << "edge " << e << " (" << graph.edge(e).first << ',' << graph.edge(e).second
        << "): count " << report.edge_counts[static_cast<std::size_t>(e)] << ", rho "
        << fmt(report.induced_rho[static_cast<std::size_t>(e)]) << '\n';
  if (report.ok()) {
    out << "certificate valid\n";
    return ExitStatus::Clean;
  }
  for (const auto& v : report.violations) out << "violation: " << v << '\n';
  return ExitStatus::Flagged;
}

} // namespace fracbp
