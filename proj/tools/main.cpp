// fracbp command-line experiment runner.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "fracbp/experiments.hpp"
#include "fracbp/trw_weights.hpp"

namespace {

using fracbp::ExitStatus;
using fracbp::ExperimentConfig;

std::string default_output(const std::string& name) {
  const char* dir = std::getenv("FRACBP_OUT_DIR");
  if (dir != nullptr && *dir != '\0') return std::string(dir) + "/" + name;
  return name;
}

void add_common_options(CLI::App* cmd, ExperimentConfig& config) {
  const std::map<std::string, fracbp::Topology> topologies{
      {"grid", fracbp::Topology::Grid}, {"complete", fracbp::Topology::Complete}};
  const std::map<std::string, fracbp::CouplingDist> couplings{
      {"attractive", fracbp::CouplingDist::AttractiveUnit},
      {"mixed", fracbp::CouplingDist::MixedUnit}};
  const std::map<std::string, fracbp::FieldDist> fields{
      {"zero", fracbp::FieldDist::Zero},
      {"sym", fracbp::FieldDist::MixedUnit},
      {"pos", fracbp::FieldDist::PositiveUnit}};
  const std::map<std::string, fracbp::Schedule> schedules{
      {"sequential", fracbp::Schedule::Sequential},
      {"parallel", fracbp::Schedule::Parallel}};

  cmd->add_option("--topology", config.topology, "grid or complete")
      ->transform(CLI::CheckedTransformer(topologies, CLI::ignore_case));
  cmd->add_option("--size", config.size, "grid side length / complete-graph order");
  cmd->add_option("--coupling", config.coupling_dist,
                  "coupling distribution: attractive U(0,1) or mixed U(-1,1)")
      ->transform(CLI::CheckedTransformer(couplings, CLI::ignore_case));
  cmd->add_option("--field", config.field_dist,
                  "field distribution: zero, sym U(-1,1) or pos U(0,1)")
      ->transform(CLI::CheckedTransformer(fields, CLI::ignore_case));
  cmd->add_option("--seed", config.seed, "instance seed");
  cmd->add_option("--lambda-start", config.lambda_start, "grid start")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--lambda-stop", config.lambda_stop, "grid stop")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--lambda-step", config.lambda_step, "grid step");
  cmd->add_option("--max-iters", config.fbp.max_iters, "message-passing iteration cap");
  cmd->add_option("--tol", config.fbp.tol, "message-passing residual tolerance");
  cmd->add_option("--damping", config.fbp.damping, "log-message damping in [0,1)");
  cmd->add_option("--schedule", config.fbp.schedule, "sequential or parallel sweeps")
      ->transform(CLI::CheckedTransformer(schedules, CLI::ignore_case));
  cmd->add_option("--samples", config.num_samples, "correction sample count");
  cmd->add_option("--cap", config.enumeration_cap, "enumeration cap (nodes)");
  cmd->add_option("--model-in", config.model_in, "load instance from model file");
  cmd->add_option("--model-out", config.model_out, "save the sampled instance");
}

int run_with_output(const std::string& path,
                    const std::function<ExitStatus(std::ostream&)>& body) {
  std::ofstream file(path);
  if (!file) {
    std::cerr << "cannot open output file: " << path << '\n';
    return static_cast<int>(ExitStatus::Usage);
  }
  const ExitStatus status = body(file);
  if (!file) {
    std::cerr << "write failed: " << path << '\n';
    return static_cast<int>(ExitStatus::Usage);
  }
  std::cerr << "wrote " << path << '\n';
  return static_cast<int>(status);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional belief propagation experiments for Ising models"};
  app.require_subcommand(1);

  ExperimentConfig config;
  std::string output;
  std::string save_cert;

  auto* sweep = app.add_subcommand(
      "sweep", "lambda scan: log Z^(lambda), correction, derivatives");
  add_common_options(sweep, config);
  sweep->add_option("--output", output, "CSV path");

  auto* star = app.add_subcommand("lambda-star", "locate the exact-crossing lambda");
  add_common_options(star, config);
  star->add_option("--output", output, "CSV path");

  auto* conc = app.add_subcommand(
      "concentration", "lambda_star spread across seeded instances per size");
  add_common_options(conc, config);
  conc->add_option("--sizes", config.sizes, "grid sizes to scan");
  conc->add_option("--instances", config.instances, "instances per size");
  conc->add_option("--output", output, "CSV path");

  auto* mc = app.add_subcommand(
      "mc-convergence", "correction estimate vs sample count");
  add_common_options(mc, config);
  mc->add_option("--output", output, "CSV path");

  auto* mixed = app.add_subcommand(
      "mixed", "crossing / no-crossing verdicts for seeded instances");
  add_common_options(mixed, config);
  mixed->add_option("--instances", config.instances, "instance count");
  mixed->add_option("--output", output, "CSV path");

  auto* trees = app.add_subcommand(
      "validate-trees", "build or load an edge-uniform certificate and validate it");
  trees->add_option("--complete", config.size, "build the certificate for K_N");
  trees->add_option("--certificate", config.certificate_file,
                    "validate this certificate file instead");
  trees->add_option("--save-certificate", save_cert,
                    "also write the built certificate here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitStatus::Usage);
  }

  try {
    if (sweep->parsed()) {
      if (output.empty()) output = default_output("sweep.csv");
      return run_with_output(output,
                             [&](std::ostream& o) { return cmd_sweep(config, o); });
    }
    if (star->parsed()) {
      if (output.empty()) output = default_output("lambda_star.csv");
      return run_with_output(
          output, [&](std::ostream& o) { return cmd_lambda_star(config, o); });
    }
    if (conc->parsed()) {
      if (output.empty()) output = default_output("concentration.csv");
      return run_with_output(
          output, [&](std::ostream& o) { return cmd_concentration(config, o); });
    }
    if (mc->parsed()) {
      // Figure-style defaults: a handful of interior lambdas.
      if (!mc->count("--lambda-start")) config.lambda_start = 0.1;
      if (!mc->count("--lambda-stop")) config.lambda_stop = 0.9;
      if (!mc->count("--lambda-step")) config.lambda_step = 0.2;
      if (output.empty()) output = default_output("mc_convergence.csv");
      return run_with_output(
          output, [&](std::ostream& o) { return cmd_mc_convergence(config, o); });
    }
    if (mixed->parsed()) {
      if (!mixed->count("--coupling")) config.coupling_dist = fracbp::CouplingDist::MixedUnit;
      if (!mixed->count("--field")) config.field_dist = fracbp::FieldDist::MixedUnit;
      if (!mixed->count("--size")) config.size = 4;
      if (!mixed->count("--instances")) config.instances = 20;
      if (output.empty()) output = default_output("mixed.csv");
      return run_with_output(output,
                             [&](std::ostream& o) { return cmd_mixed(config, o); });
    }
    if (trees->parsed()) {
      if (!save_cert.empty() && config.certificate_file.empty()) {
        const fracbp::Graph graph = fracbp::build_complete(config.size);
        const auto set = fracbp::build_edge_uniform_certificate(graph);
        std::ofstream file(save_cert);
        if (!file) {
          std::cerr << "cannot open output file: " << save_cert << '\n';
          return static_cast<int>(ExitStatus::Usage);
        }
        fracbp::write_certificate(file, graph, set);
        std::cerr << "wrote " << save_cert << '\n';
      }
      return static_cast<int>(fracbp::cmd_validate_trees(config, std::cout));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitStatus::Usage);
  }
  return static_cast<int>(ExitStatus::Usage);
}
