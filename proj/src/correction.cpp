#include "fracbp/correction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracbp/numerics.hpp"
#include "fracbp/rng.hpp"

namespace fracbp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-edge and per-node log-belief tables with their exponents folded in, so
// one state evaluation is a table-lookup sum.
struct WeightTables {
  std::vector<std::array<double, 4>> edge;     // rho * log B_ab
  std::vector<std::array<double, 2>> node_sum; // (sum_c rho) * log B_a
  std::vector<std::array<double, 2>> node_log; // log B_a
};

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

WeightTables make_tables(const IsingModel& model, const std::vector<double>& rho_lam,
                         const BeliefSet& beliefs) {
  const Graph& g = model.graph;
  if (static_cast<int>(rho_lam.size()) != g.edge_count())
    throw std::invalid_argument("rho_lam length does not match edge count");
  if (static_cast<int>(beliefs.node.size()) != g.node_count() ||
      static_cast<int>(beliefs.edge.size()) != g.edge_count())
    throw std::invalid_argument("belief set does not match the model");

  WeightTables t;
  t.edge.resize(static_cast<std::size_t>(g.edge_count()));
  t.node_sum.resize(static_cast<std::size_t>(g.node_count()));
  t.node_log.resize(static_cast<std::size_t>(g.node_count()));

  for (int e = 0; e < g.edge_count(); ++e)
    for (int k = 0; k < 4; ++k)
      t.edge[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)] =
          rho_lam[static_cast<std::size_t>(e)] *
          safe_log(beliefs.edge[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)]);

  for (int a = 0; a < g.node_count(); ++a) {
    double rho_sum = 0.0;
    for (const auto& inc : g.incident(a))
      rho_sum += rho_lam[static_cast<std::size_t>(inc.edge)];
    for (int i = 0; i < 2; ++i) {
      const double lb =
          safe_log(beliefs.node[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)]);
      t.node_log[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] = lb;
      t.node_sum[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] = rho_sum * lb;
    }
  }
  return t;
}

double log_weight_from_tables(const Graph& g, const WeightTables& t,
                              const std::vector<int>& spin_index) {
  double lw = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto [p, q] = g.edge(e);
    lw += t.edge[static_cast<std::size_t>(e)][static_cast<std::size_t>(
        spin_index[static_cast<std::size_t>(p)] * 2 +
        spin_index[static_cast<std::size_t>(q)])];
  }
  for (int a = 0; a < g.node_count(); ++a) {
    const double node_term = t.node_sum[static_cast<std::size_t>(a)][static_cast<std::size_t>(
        spin_index[static_cast<std::size_t>(a)])];
    if (node_term == kNegInf)
      throw std::invalid_argument("degenerate node marginal: zero belief at a "
                                  "sampled state");
    lw -= node_term;
  }
  return lw;
}

} // namespace

double log_weight(const IsingModel& model, const std::vector<double>& rho_lam,
                  const BeliefSet& beliefs, const std::vector<int>& state) {
  const Graph& g = model.graph;
  if (static_cast<int>(state.size()) != g.node_count())
    throw std::invalid_argument("state length does not match node count");
  std::vector<int> idx(state.size());
  for (std::size_t a = 0; a < state.size(); ++a) {
    if (state[a] != 1 && state[a] != -1)
      throw std::invalid_argument("state entries must be +1 or -1");
    idx[a] = state[a] > 0 ? 1 : 0;
  }
  const WeightTables t = make_tables(model, rho_lam, beliefs);
  return log_weight_from_tables(g, t, idx);
}

double exact_correction(const IsingModel& model, const std::vector<double>& rho_lam,
                        const BeliefSet& beliefs, int cap) {
  const Graph& g = model.graph;
  const int n = g.node_count();
  if (n > cap) throw std::invalid_argument("exact_correction: above the enumeration cap");

  const WeightTables t = make_tables(model, rho_lam, beliefs);

  // Summand per state: weight times the product of node beliefs, i.e.
  // exp(log_weight + sum_a log B_a); that collapses the node exponent to
  // (sum_c rho) - 1.
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  auto state_log_term = [&]() {
    double lt = 0.0;
    for (int a = 0; a < n; ++a) {
      const std::size_t i = static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
      // A state outside the support of the node-belief product contributes
      // nothing (the expectation runs over the support only).
      if (t.node_log[static_cast<std::size_t>(a)][i] == kNegInf) return kNegInf;
      lt -= t.node_sum[static_cast<std::size_t>(a)][i];
      lt += t.node_log[static_cast<std::size_t>(a)][i];
    }
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto [p, q] = g.edge(e);
      lt += t.edge[static_cast<std::size_t>(e)][static_cast<std::size_t>(
          idx[static_cast<std::size_t>(p)] * 2 + idx[static_cast<std::size_t>(q)])];
    }
    return lt;
  };

  auto enumerate = [&](auto&& visit) {
    for (std::uint64_t k = 0; k < total; ++k) {
      for (int a = 0; a < n; ++a)
        idx[static_cast<std::size_t>(a)] = static_cast<int>((k >> a) & 1u);
      visit(state_log_term());
    }
  };

  double max_lt = kNegInf;
  enumerate([&](double lt) { max_lt = std::max(max_lt, lt); });
  if (max_lt == kNegInf)
    throw std::invalid_argument("exact_correction: all states carry zero weight");

  KahanSum sum;
  enumerate([&](double lt) { sum.add(std::exp(lt - max_lt)); });
  return max_lt + std::log(sum.value());
}

CorrectionEstimate estimate_correction(const IsingModel& model,
                                       const std::vector<double>& rho_lam,
                                       const BeliefSet& beliefs,
                                       std::int64_t num_samples, std::uint64_t seed) {
  if (num_samples < 1) throw std::invalid_argument("need at least one sample");
  const Graph& g = model.graph;
  const int n = g.node_count();
  const WeightTables t = make_tables(model, rho_lam, beliefs);

  constexpr std::int64_t kBatch = 1024;

  // Streaming scaled moments: shift = running max log weight,
  // s1 = sum exp(lw - shift), s2 = sum exp(2(lw - shift)).
  double shift = kNegInf;
  double s1 = 0.0;
  double s2 = 0.0;
  std::int64_t done = 0;

  CorrectionEstimate out;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);

  for (std::int64_t batch = 0; done < num_samples; ++batch) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(batch));
    const std::int64_t batch_size = std::min(kBatch, num_samples - done);
    for (std::int64_t s = 0; s < batch_size; ++s) {
      for (int a = 0; a < n; ++a)
        idx[static_cast<std::size_t>(a)] =
            rng.next_double() < beliefs.node[static_cast<std::size_t>(a)][1] ? 1 : 0;

      double lw = 0.0;
      for (int e = 0; e < g.edge_count(); ++e) {
        const auto [p, q] = g.edge(e);
        lw += t.edge[static_cast<std::size_t>(e)][static_cast<std::size_t>(
            idx[static_cast<std::size_t>(p)] * 2 + idx[static_cast<std::size_t>(q)])];
      }
      for (int a = 0; a < n; ++a) {
        const double node_term =
            t.node_sum[static_cast<std::size_t>(a)][static_cast<std::size_t>(
                idx[static_cast<std::size_t>(a)])];
        if (node_term == kNegInf)
          throw std::invalid_argument("degenerate node marginal: zero belief at a "
                                      "sampled state");
        lw -= node_term;
      }

      if (lw == kNegInf) {
        // weight exactly zero; contributes nothing to either moment
      } else if (lw <= shift) {
        const double w = std::exp(lw - shift);
        s1 += w;
        s2 += w * w;
      } else {
        const double rescale = std::exp(shift - lw);
        s1 = s1 * rescale + 1.0;
        s2 = s2 * rescale * rescale + 1.0;
        shift = lw;
      }
    }
    done += batch_size;
    const double running =
        s1 > 0.0 ? shift + std::log(s1) - std::log(static_cast<double>(done)) : kNegInf;
    out.trace.emplace_back(done, running);
  }

  out.samples = num_samples;
  if (s1 <= 0.0) {
    out.all_zero_weights = true;
    out.log_mean = kNegInf;
    out.std_error_log = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  const double nd = static_cast<double>(num_samples);
  out.log_mean = shift + std::log(s1) - std::log(nd);
  if (num_samples > 1) {
    // Delta method: se(log m) = sd(w) / (m sqrt(n)); in scaled moments,
    // sd^2 = (s2 - s1^2/n) / (n-1) up to the common exp(2 shift) factor
    // which cancels against m^2.
    const double variance_scaled = std::max(0.0, (s2 - s1 * s1 / nd) / (nd - 1.0));
    out.std_error_log = std::sqrt(variance_scaled / nd) * nd / s1;
  } else {
    out.std_error_log = std::numeric_limits<double>::infinity();
  }
  return out;
}

} // namespace fracbp
