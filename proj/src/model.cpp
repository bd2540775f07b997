#include "fracbp/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fracbp/rng.hpp"

namespace fracbp {

IsingModel IsingModel::make(Graph graph, std::vector<double> couplings,
                            std::vector<double> fields) {
  if (static_cast<int>(couplings.size()) != graph.edge_count())
    throw std::invalid_argument("coupling count does not match edge count");
  if (static_cast<int>(fields.size()) != graph.node_count())
    throw std::invalid_argument("field count does not match node count");
  for (double j : couplings)
    if (!std::isfinite(j)) throw std::invalid_argument("non-finite coupling");
  for (double h : fields)
    if (!std::isfinite(h)) throw std::invalid_argument("non-finite field");
  return IsingModel{std::move(graph), std::move(couplings), std::move(fields)};
}

IsingModel sample_instance(const EnsembleSpec& spec) {
  Graph graph = spec.topology == Topology::Grid ? build_grid(spec.size)
                                                : build_complete(spec.size);
  SplitMix64 coupling_rng = SplitMix64::substream(spec.seed, 0);
  SplitMix64 field_rng = SplitMix64::substream(spec.seed, 1);

  std::vector<double> couplings(static_cast<std::size_t>(graph.edge_count()));
  for (double& j : couplings)
    j = spec.coupling_dist == CouplingDist::AttractiveUnit
            ? coupling_rng.next_double()
            : coupling_rng.next_double(-1.0, 1.0);

  std::vector<double> fields(static_cast<std::size_t>(graph.node_count()), 0.0);
  if (spec.field_dist != FieldDist::Zero)
    for (double& h : fields)
      h = spec.field_dist == FieldDist::PositiveUnit
              ? field_rng.next_double()
              : field_rng.next_double(-1.0, 1.0);

  return IsingModel::make(std::move(graph), std::move(couplings), std::move(fields));
}

double edge_energy(const IsingModel& model, int edge, int xa, int xb) {
  if (edge < 0 || edge >= model.graph.edge_count())
    throw std::invalid_argument("edge id out of range");
  if ((xa != 1 && xa != -1) || (xb != 1 && xb != -1))
    throw std::invalid_argument("spins must be +1 or -1");
  const auto [a, b] = model.graph.edge(edge);
  const double j = model.couplings[static_cast<std::size_t>(edge)];
  return -j * xa * xb -
         (model.fields[static_cast<std::size_t>(a)] * xa +
          model.fields[static_cast<std::size_t>(b)] * xb) / 2.0;
}

double total_energy(const IsingModel& model, const std::vector<int>& state) {
  double e = 0.0;
  for (int eid = 0; eid < model.graph.edge_count(); ++eid) {
    const auto [a, b] = model.graph.edge(eid);
    e -= model.couplings[static_cast<std::size_t>(eid)] *
         state[static_cast<std::size_t>(a)] * state[static_cast<std::size_t>(b)];
  }
  for (int v = 0; v < model.graph.node_count(); ++v)
    e -= model.fields[static_cast<std::size_t>(v)] * state[static_cast<std::size_t>(v)];
  return e;
}

double total_edge_energy(const IsingModel& model, const std::vector<int>& state) {
  double e = 0.0;
  for (int eid = 0; eid < model.graph.edge_count(); ++eid) {
    const auto [a, b] = model.graph.edge(eid);
    e += edge_energy(model, eid, state[static_cast<std::size_t>(a)],
                     state[static_cast<std::size_t>(b)]);
  }
  return e;
}

namespace {

std::string hex_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& tok) {
  std::size_t pos = 0;
  const double v = std::stod(tok, &pos);
  if (pos != tok.size()) throw std::runtime_error("malformed number: " + tok);
  return v;
}

} // namespace

void write_model(std::ostream& out, const IsingModel& model) {
  out << "ising " << model.graph.node_count() << ' ' << model.graph.edge_count() << '\n';
  for (int v = 0; v < model.graph.node_count(); ++v)
    out << "node " << v << ' ' << hex_double(model.fields[static_cast<std::size_t>(v)])
        << '\n';
  for (int e = 0; e < model.graph.edge_count(); ++e) {
    const auto [a, b] = model.graph.edge(e);
    out << "edge " << a << ' ' << b << ' '
        << hex_double(model.couplings[static_cast<std::size_t>(e)]) << '\n';
  }
}

IsingModel read_model(std::istream& in) {
  std::string tag;
  int node_count = 0;
  int edge_count = 0;
  if (!(in >> tag >> node_count >> edge_count) || tag != "ising")
    throw std::runtime_error("model file: missing 'ising' header");

  std::vector<double> fields(static_cast<std::size_t>(node_count), 0.0);
  for (int i = 0; i < node_count; ++i) {
    int id = 0;
    std::string value;
    if (!(in >> tag >> id >> value) || tag != "node" || id != i)
      throw std::runtime_error("model file: bad node record " + std::to_string(i));
    fields[static_cast<std::size_t>(i)] = parse_double(value);
  }

  std::vector<std::pair<int, int>> edges;
  std::vector<double> file_couplings;
  edges.reserve(static_cast<std::size_t>(edge_count));
  file_couplings.reserve(static_cast<std::size_t>(edge_count));
  for (int i = 0; i < edge_count; ++i) {
    int a = 0;
    int b = 0;
    std::string value;
    if (!(in >> tag >> a >> b >> value) || tag != "edge")
      throw std::runtime_error("model file: bad edge record " + std::to_string(i));
    edges.emplace_back(a, b);
    file_couplings.push_back(parse_double(value));
  }

  Graph graph = Graph::from_edges(node_count, edges);
  // from_edges canonicalizes edge order; re-map couplings by endpoints so a
  // file with edges in any order still reads correctly.
  std::vector<double> couplings(static_cast<std::size_t>(edge_count), 0.0);
  for (int i = 0; i < edge_count; ++i) {
    const int id = graph.find_edge(edges[static_cast<std::size_t>(i)].first,
                                   edges[static_cast<std::size_t>(i)].second);
    couplings[static_cast<std::size_t>(id)] = file_couplings[static_cast<std::size_t>(i)];
  }
  return IsingModel::make(std::move(graph), std::move(couplings), std::move(fields));
}

void save_model(const std::string& path, const IsingModel& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_model(out, model);
  if (!out) throw std::runtime_error("write failed: " + path);
}

IsingModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return read_model(in);
}

} // namespace fracbp
