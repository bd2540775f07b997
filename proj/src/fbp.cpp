#include "fracbp/fbp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fracbp/numerics.hpp"

namespace fracbp {

namespace {

constexpr double kDegenerateEps = 1e-9;

// Precomputed per-run quantities. gamma[slot] is the message exponent
// (S_dest - 1) / rho_e where S_dest sums rho_lam over the destination's
// incident edges. leaf_direct marks slots whose exponent vanishes (only
// legal at degree-one destinations, where the update is the bare edge sum).
struct Workspace {
  std::vector<double> rho;                  // per edge
  std::vector<double> node_sum;             // per node, S_a
  std::vector<double> gamma;                // per slot (2 per edge)
  std::vector<char> leaf_direct;            // per slot
  std::vector<std::array<double, 4>> energy; // per edge, [ip*2+iq]
};

Workspace make_workspace(const IsingModel& model, const std::vector<double>& rho_lam) {
  const Graph& g = model.graph;
  if (static_cast<int>(rho_lam.size()) != g.edge_count())
    throw std::invalid_argument("rho_lam length does not match edge count");
  for (double r : rho_lam)
    if (!(r > 0.0 && r <= 1.0))
      throw std::invalid_argument("rho_lam entries must lie in (0, 1]");

  Workspace ws;
  ws.rho = rho_lam;
  ws.node_sum.assign(static_cast<std::size_t>(g.node_count()), 0.0);
  for (int v = 0; v < g.node_count(); ++v) {
    if (g.degree(v) == 0)
      throw std::invalid_argument("node " + std::to_string(v) +
                                  " is isolated; message passing needs degree >= 1");
    for (const auto& inc : g.incident(v))
      ws.node_sum[static_cast<std::size_t>(v)] += rho_lam[static_cast<std::size_t>(inc.edge)];
  }

  ws.gamma.assign(static_cast<std::size_t>(2 * g.edge_count()), 0.0);
  ws.leaf_direct.assign(static_cast<std::size_t>(2 * g.edge_count()), 0);
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto [p, q] = g.edge(e);
    for (int side = 0; side < 2; ++side) {
      const int dest = side == 0 ? p : q;
      const double excess = ws.node_sum[static_cast<std::size_t>(dest)] - 1.0;
      const std::size_t slot = static_cast<std::size_t>(2 * e + side);
      if (std::abs(excess) <= kDegenerateEps) {
        if (g.degree(dest) != 1)
          throw std::invalid_argument(
              "node " + std::to_string(dest) +
              ": incident rho_lam sums to 1 at degree > 1; the belief exponent "
              "degenerates");
        ws.leaf_direct[slot] = 1;
      } else {
        ws.gamma[slot] = excess / rho_lam[static_cast<std::size_t>(e)];
      }
    }
  }

  ws.energy.resize(static_cast<std::size_t>(g.edge_count()));
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto [p, q] = g.edge(e);
    const double j = model.couplings[static_cast<std::size_t>(e)];
    const double hp = model.fields[static_cast<std::size_t>(p)] / g.degree(p);
    const double hq = model.fields[static_cast<std::size_t>(q)] / g.degree(q);
    for (int ip = 0; ip < 2; ++ip)
      for (int iq = 0; iq < 2; ++iq) {
        const int xp = 2 * ip - 1;
        const int xq = 2 * iq - 1;
        ws.energy[static_cast<std::size_t>(e)][static_cast<std::size_t>(ip * 2 + iq)] =
            -j * xp * xq - hp * xp - hq * xq;
      }
  }
  return ws;
}

// Edge-sum message target: for the slot toward `dest` on edge e,
//   log M(x_dest) = LSE over x_src of [-E(x_dest,x_src)/rho_e
//                                      + gamma_src * log mu_toward_src(x_src)].
std::array<double, 2> edge_sum(const Graph&, const Workspace& ws,
                               const MessageSet& mu, int e, int side_toward) {
  const bool dest_is_p = side_toward == 0;
  const std::size_t src_slot = static_cast<std::size_t>(2 * e + (dest_is_p ? 1 : 0));
  const double rho = ws.rho[static_cast<std::size_t>(e)];
  const double gsrc = ws.leaf_direct[src_slot] ? 0.0 : ws.gamma[src_slot];

  std::array<double, 2> out{};
  for (int id = 0; id < 2; ++id) {
    double terms[2];
    for (int is = 0; is < 2; ++is) {
      const std::size_t idx =
          static_cast<std::size_t>(dest_is_p ? id * 2 + is : is * 2 + id);
      terms[is] = -ws.energy[static_cast<std::size_t>(e)][idx] / rho +
                  gsrc * mu.log_mu[src_slot][static_cast<std::size_t>(is)];
    }
    out[static_cast<std::size_t>(id)] = log_sum_exp(terms[0], terms[1]);
  }
  return out;
}

// One full sweep. Returns the sup-norm of the applied (damped, normalized)
// log-message change. Sequential mode updates each node's incoming block in
// place; parallel mode computes every edge sum from the pre-sweep snapshot.
double sweep(const IsingModel& model, const Workspace& ws, MessageSet& mu,
             double damping, Schedule schedule) {
  const Graph& g = model.graph;
  double residual = 0.0;

  std::vector<std::array<double, 2>> all_sums;
  if (schedule == Schedule::Parallel) {
    all_sums.resize(static_cast<std::size_t>(2 * g.edge_count()));
    for (int e = 0; e < g.edge_count(); ++e)
      for (int side = 0; side < 2; ++side)
        all_sums[static_cast<std::size_t>(2 * e + side)] = edge_sum(g, ws, mu, e, side);
  }

  std::vector<std::array<double, 2>> local;
  for (int a = 0; a < g.node_count(); ++a) {
    const auto& incident = g.incident(a);
    local.assign(incident.size(), {});
    for (std::size_t k = 0; k < incident.size(); ++k) {
      const int e = incident[k].edge;
      const int side = g.edge(e).first == a ? 0 : 1;
      local[k] = schedule == Schedule::Parallel
                     ? all_sums[static_cast<std::size_t>(2 * e + side)]
                     : edge_sum(g, ws, mu, e, side);
    }

    std::array<double, 2> weighted{0.0, 0.0};
    for (std::size_t k = 0; k < incident.size(); ++k) {
      const double rho = ws.rho[static_cast<std::size_t>(incident[k].edge)];
      weighted[0] += rho * local[k][0];
      weighted[1] += rho * local[k][1];
    }

    for (std::size_t k = 0; k < incident.size(); ++k) {
      const int e = incident[k].edge;
      const int side = g.edge(e).first == a ? 0 : 1;
      const std::size_t slot = static_cast<std::size_t>(2 * e + side);
      std::array<double, 2> target{};
      for (int i = 0; i < 2; ++i) {
        target[static_cast<std::size_t>(i)] =
            ws.leaf_direct[slot]
                ? local[k][static_cast<std::size_t>(i)]
                : (weighted[static_cast<std::size_t>(i)] -
                   local[k][static_cast<std::size_t>(i)]) /
                      ws.gamma[slot];
      }
      std::array<double, 2> next{};
      for (int i = 0; i < 2; ++i)
        next[static_cast<std::size_t>(i)] =
            damping * mu.log_mu[slot][static_cast<std::size_t>(i)] +
            (1.0 - damping) * target[static_cast<std::size_t>(i)];
      const double shift = std::max(next[0], next[1]);
      next[0] -= shift;
      next[1] -= shift;
      residual = std::max(residual, std::abs(next[0] - mu.log_mu[slot][0]));
      residual = std::max(residual, std::abs(next[1] - mu.log_mu[slot][1]));
      mu.log_mu[slot] = next;
    }
  }
  return residual;
}

} // namespace

MessageSet MessageSet::uniform(const Graph& graph) {
  MessageSet m;
  m.log_mu.assign(static_cast<std::size_t>(2 * graph.edge_count()), {0.0, 0.0});
  return m;
}

int MessageSet::slot_toward(const Graph& graph, int edge, int node) {
  return 2 * edge + (graph.edge(edge).first == node ? 0 : 1);
}

void MessageSet::normalize() {
  for (auto& m : log_mu) {
    const double shift = std::max(m[0], m[1]);
    m[0] -= shift;
    m[1] -= shift;
  }
}

bool MessageSet::finite() const {
  for (const auto& m : log_mu)
    if (!std::isfinite(m[0]) || !std::isfinite(m[1])) return false;
  return true;
}

double BeliefSet::max_marginalization_gap(const Graph& graph) const {
  double gap = 0.0;
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto [p, q] = graph.edge(e);
    const auto& be = edge[static_cast<std::size_t>(e)];
    for (int i = 0; i < 2; ++i) {
      const double row = be[static_cast<std::size_t>(i * 2)] +
                         be[static_cast<std::size_t>(i * 2 + 1)];
      const double col = be[static_cast<std::size_t>(i)] +
                         be[static_cast<std::size_t>(2 + i)];
      gap = std::max(gap,
                     std::abs(row - node[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)]));
      gap = std::max(gap,
                     std::abs(col - node[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)]));
    }
  }
  return gap;
}

FbpResult run_fbp(const IsingModel& model, const std::vector<double>& rho_lam,
                  const FbpOptions& options) {
  if (options.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (!(options.damping >= 0.0 && options.damping < 1.0))
    throw std::invalid_argument("damping must lie in [0, 1)");

  const Workspace ws = make_workspace(model, rho_lam);

  MessageSet mu = options.init ? *options.init : MessageSet::uniform(model.graph);
  if (static_cast<int>(mu.log_mu.size()) != 2 * model.graph.edge_count())
    throw std::invalid_argument("initial message set has wrong size");
  if (!mu.finite()) throw std::invalid_argument("initial messages must be finite");
  mu.normalize();

  FbpResult result;
  result.converged = false;

  MessageSet best = mu;
  double best_residual = std::numeric_limits<double>::infinity();

  int iter = 0;
  for (; iter < options.max_iters; ++iter) {
    const double residual = sweep(model, ws, mu, options.damping, options.schedule);
    if (!mu.finite())
      throw std::runtime_error("message update overflowed; rho_lam exponents are "
                               "pathological for this model");
    result.residual_trace.push_back(residual);
    if (residual < best_residual) {
      best_residual = residual;
      best = mu;
    }
    if (residual <= options.tol) {
      result.converged = true;
      ++iter;
      break;
    }
  }

  result.messages = result.converged ? mu : best;
  result.iterations = iter;
  result.final_residual = result.converged ? result.residual_trace.back() : best_residual;
  result.beliefs = beliefs_from_messages(model, rho_lam, result.messages);
  result.free_energy = free_energy(model, rho_lam, result.beliefs, options.tau_cons);
  result.log_z = -result.free_energy;
  return result;
}

BeliefSet beliefs_from_messages(const IsingModel& model,
                                const std::vector<double>& rho_lam,
                                const MessageSet& messages) {
  if (!messages.finite())
    throw std::invalid_argument("beliefs_from_messages: messages must be finite");
  const Workspace ws = make_workspace(model, rho_lam);
  const Graph& g = model.graph;

  BeliefSet beliefs;
  beliefs.node.resize(static_cast<std::size_t>(g.node_count()));
  beliefs.edge.resize(static_cast<std::size_t>(g.edge_count()));

  for (int a = 0; a < g.node_count(); ++a) {
    std::array<double, 2> logp{0.0, 0.0};
    for (const auto& inc : g.incident(a)) {
      const std::size_t slot =
          static_cast<std::size_t>(MessageSet::slot_toward(g, inc.edge, a));
      logp[0] += messages.log_mu[slot][0];
      logp[1] += messages.log_mu[slot][1];
    }
    const double shift = std::max(logp[0], logp[1]);
    const double w0 = std::exp(logp[0] - shift);
    const double w1 = std::exp(logp[1] - shift);
    beliefs.node[static_cast<std::size_t>(a)] = {w0 / (w0 + w1), w1 / (w0 + w1)};
  }

  for (int e = 0; e < g.edge_count(); ++e) {
    const std::size_t sp = static_cast<std::size_t>(2 * e);
    const std::size_t sq = static_cast<std::size_t>(2 * e + 1);
    const double gp = ws.leaf_direct[sp] ? 0.0 : ws.gamma[sp];
    const double gq = ws.leaf_direct[sq] ? 0.0 : ws.gamma[sq];
    const double rho = ws.rho[static_cast<std::size_t>(e)];

    std::array<double, 4> logq{};
    for (int ip = 0; ip < 2; ++ip)
      for (int iq = 0; iq < 2; ++iq)
        logq[static_cast<std::size_t>(ip * 2 + iq)] =
            -ws.energy[static_cast<std::size_t>(e)][static_cast<std::size_t>(ip * 2 + iq)] /
                rho +
            gp * messages.log_mu[sp][static_cast<std::size_t>(ip)] +
            gq * messages.log_mu[sq][static_cast<std::size_t>(iq)];

    const double shift = std::max(std::max(logq[0], logq[1]), std::max(logq[2], logq[3]));
    std::array<double, 4> w{};
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      w[static_cast<std::size_t>(k)] = std::exp(logq[static_cast<std::size_t>(k)] - shift);
      total += w[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < 4; ++k)
      beliefs.edge[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)] =
          w[static_cast<std::size_t>(k)] / total;
  }
  return beliefs;
}

double free_energy(const IsingModel& model, const std::vector<double>& rho_lam,
                   const BeliefSet& beliefs, double tau_cons) {
  const Workspace ws = make_workspace(model, rho_lam);
  const Graph& g = model.graph;

  if (static_cast<int>(beliefs.node.size()) != g.node_count() ||
      static_cast<int>(beliefs.edge.size()) != g.edge_count())
    throw std::invalid_argument("belief set does not match the model");
  for (const auto& bn : beliefs.node)
    if (bn[0] < 0.0 || bn[1] < 0.0 || std::abs(bn[0] + bn[1] - 1.0) > 1e-12)
      throw std::invalid_argument("node belief not a normalized distribution");
  for (const auto& be : beliefs.edge) {
    double total = 0.0;
    for (double v : be) {
      if (v < 0.0) throw std::invalid_argument("negative edge belief");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("edge belief not normalized");
  }
  const double gap = beliefs.max_marginalization_gap(g);
  if (gap > tau_cons)
    throw std::invalid_argument("beliefs violate local consistency: gap " +
                                std::to_string(gap));

  double mean_energy = 0.0;
  double entropy = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& be = beliefs.edge[static_cast<std::size_t>(e)];
    double edge_entropy = 0.0;
    for (int k = 0; k < 4; ++k) {
      mean_energy +=
          ws.energy[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)] *
          be[static_cast<std::size_t>(k)];
      edge_entropy += xlogx(be[static_cast<std::size_t>(k)]);
    }
    entropy -= ws.rho[static_cast<std::size_t>(e)] * edge_entropy;
  }
  for (int a = 0; a < g.node_count(); ++a) {
    const auto& bn = beliefs.node[static_cast<std::size_t>(a)];
    entropy += (ws.node_sum[static_cast<std::size_t>(a)] - 1.0) *
               (xlogx(bn[0]) + xlogx(bn[1]));
  }
  return mean_energy - entropy;
}

double message_residual(const IsingModel& model, const std::vector<double>& rho_lam,
                        const MessageSet& messages) {
  const Workspace ws = make_workspace(model, rho_lam);
  MessageSet probe = messages;
  probe.normalize();
  MessageSet next = probe;
  const double residual = sweep(model, ws, next, 0.0, Schedule::Parallel);
  (void)next;
  return residual;
}

LogZResult log_z_from_messages(const IsingModel& model,
                               const std::vector<double>& rho_lam,
                               const MessageSet& messages, double tol) {
  if (!messages.finite())
    throw std::invalid_argument("log_z_from_messages: messages must be finite");
  const Workspace ws = make_workspace(model, rho_lam);
  const Graph& g = model.graph;

  double log_z = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    const std::size_t sp = static_cast<std::size_t>(2 * e);
    const std::size_t sq = static_cast<std::size_t>(2 * e + 1);
    const double gp = ws.leaf_direct[sp] ? 0.0 : ws.gamma[sp];
    const double gq = ws.leaf_direct[sq] ? 0.0 : ws.gamma[sq];
    const double rho = ws.rho[static_cast<std::size_t>(e)];
    std::array<double, 4> terms{};
    for (int ip = 0; ip < 2; ++ip)
      for (int iq = 0; iq < 2; ++iq)
        terms[static_cast<std::size_t>(ip * 2 + iq)] =
            -ws.energy[static_cast<std::size_t>(e)][static_cast<std::size_t>(ip * 2 + iq)] /
                rho +
            gp * messages.log_mu[sp][static_cast<std::size_t>(ip)] +
            gq * messages.log_mu[sq][static_cast<std::size_t>(iq)];
    log_z += rho * log_sum_exp4(terms[0], terms[1], terms[2], terms[3]);
  }
  for (int a = 0; a < g.node_count(); ++a) {
    std::array<double, 2> logp{0.0, 0.0};
    for (const auto& inc : g.incident(a)) {
      const std::size_t slot =
          static_cast<std::size_t>(MessageSet::slot_toward(g, inc.edge, a));
      logp[0] += messages.log_mu[slot][0];
      logp[1] += messages.log_mu[slot][1];
    }
    log_z += (1.0 - ws.node_sum[static_cast<std::size_t>(a)]) *
             log_sum_exp(logp[0], logp[1]);
  }

  LogZResult out;
  out.value = log_z;
  out.residual = message_residual(model, rho_lam, messages);
  out.fixed_point_warning = out.residual > tol;
  return out;
}

} // namespace fracbp
