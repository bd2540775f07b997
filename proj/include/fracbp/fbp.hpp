#pragma once

#include <array>
#include <optional>
#include <vector>

#include "fracbp/model.hpp"

namespace fracbp {

/// Log-domain directed messages log mu_{b->a}(x_a). Spin indexing is
/// x = -1 -> 0, x = +1 -> 1 throughout. Edge e = (p, q) owns two slots:
/// slot 2e is the message toward p (a function of x_p), slot 2e+1 the
/// message toward q. Messages are kept max-normalized (max entry 0).
struct MessageSet {
  std::vector<std::array<double, 2>> log_mu;

  static MessageSet uniform(const Graph& graph);
  static int slot_toward(const Graph& graph, int edge, int node);
  void normalize();
  bool finite() const;
};

/// Node and edge marginal beliefs. Edge entries are [x_p_index * 2 +
/// x_q_index] with (p, q) the canonical endpoint order of the edge.
struct BeliefSet {
  std::vector<std::array<double, 2>> node;
  std::vector<std::array<double, 4>> edge;

  /// Largest violation of the marginalization constraints
  /// sum_{x_q} B_pq(x_p, x_q) = B_p(x_p) over all edges and endpoints.
  double max_marginalization_gap(const Graph& graph) const;
};

enum class Schedule { Sequential, Parallel };

struct FbpOptions {
  int max_iters = 10000;
  double tol = 1e-10;       // sup-norm of log-message change per sweep
  double damping = 0.5;     // fraction of the old log message retained
  Schedule schedule = Schedule::Sequential;
  std::optional<MessageSet> init; // default: uniform
  double tau_cons = 1e-7;   // belief-consistency tolerance
};

struct FbpResult {
  MessageSet messages;
  BeliefSet beliefs;
  double free_energy = 0.0; // variational value at the returned beliefs
  double log_z = 0.0;       // exactly -free_energy
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> residual_trace;
};

/// Damped fixed-point iteration for the fractional message-passing
/// equations. rho_lam holds the per-edge interpolated appearance
/// probabilities, each in (0, 1]. Node fields are split across incident
/// edges in proportion 1/degree so the edge energies assemble the global
/// model energy on any graph.
///
/// A node whose incident rho_lam sum equals 1 has a vanishing belief
/// exponent; that is handled for degree-one nodes (the message reduces to
/// the plain edge sum) and rejected otherwise.
///
/// On non-convergence the best-residual iterate is returned with
/// converged = false.
FbpResult run_fbp(const IsingModel& model, const std::vector<double>& rho_lam,
                  const FbpOptions& options = {});

/// Node beliefs from incoming-message products, edge beliefs from the
/// exponent-weighted pair formula; both renormalized.
BeliefSet beliefs_from_messages(const IsingModel& model,
                                const std::vector<double>& rho_lam,
                                const MessageSet& messages);

/// Variational free energy: mean energy minus the rho-weighted entropy, with
/// 0 log 0 := 0. Throws if the beliefs violate local consistency beyond
/// tau_cons.
double free_energy(const IsingModel& model, const std::vector<double>& rho_lam,
                   const BeliefSet& beliefs, double tau_cons = 1e-7);

/// Sup-norm distance of the messages from the undamped update target; zero
/// at a fixed point.
double message_residual(const IsingModel& model, const std::vector<double>& rho_lam,
                        const MessageSet& messages);

struct LogZResult {
  double value = 0.0;
  double residual = 0.0;
  bool fixed_point_warning = false; // set when residual > tol
};

/// log Z directly from the messages (the per-edge bracket product formula,
/// each bracket raised to its rho_lam). Must agree with
/// -free_energy(beliefs_from_messages(...)) at a fixed point.
LogZResult log_z_from_messages(const IsingModel& model,
                               const std::vector<double>& rho_lam,
                               const MessageSet& messages, double tol = 1e-8);

} // namespace fracbp
