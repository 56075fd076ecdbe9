#include "resdeloc/model.hpp"

#include <limits>
#include <stdexcept>

namespace resdeloc {

double OperatorModel::effective_density_sup() const {
  if (lambda == 0.0) return std::numeric_limits<double>::infinity();
  return dist.density_sup() / lambda;
}

PotentialSample sample_potential(const OperatorModel& model, std::uint64_t replicate,
                                 const StreamKey& key) {
  std::vector<std::uint64_t> path = key.path;
  path.push_back(replicate);
  Rng rng = make_stream(model.seed, key.tag, path);

  PotentialSample s;
  s.replicate = replicate;
  s.seed_path = "seed=" + std::to_string(model.seed) + "/tag=" +
                std::to_string(static_cast<std::uint64_t>(key.tag));
  for (auto p : path) s.seed_path += "/" + std::to_string(p);
  s.stream_key.push_back(static_cast<std::uint64_t>(key.tag));
  s.stream_key.insert(s.stream_key.end(), path.begin(), path.end());

  const std::size_t n = model.graph.vertex_count();
  s.values.resize(n);
  for (std::size_t v = 0; v < n; ++v) s.values[v] = model.lambda * model.dist.sample(rng);
  return s;
}

PotentialSample conditional_resample(const PotentialSample& sample, VertexId x, double value) {
  if (x >= sample.values.size()) throw std::out_of_range("conditional_resample: vertex out of range");
  PotentialSample out = sample;
  out.values[x] = value;
  return out;
}

Eigen::MatrixXd hopping_matrix(const OperatorModel& model) {
  const Graph& g = model.graph;
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  if (model.hopping == 0.0) return a;
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    for (VertexId w : g.neighbors(v))
      a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) = model.hopping;
  return a;
}

Eigen::MatrixXd hamiltonian(const OperatorModel& model, const PotentialSample& sample) {
  if (sample.values.size() != model.graph.vertex_count())
    throw std::invalid_argument("hamiltonian: sample size does not match graph");
  Eigen::MatrixXd h = hopping_matrix(model);
  for (std::size_t v = 0; v < sample.values.size(); ++v)
    h(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v)) += sample.values[v];
  return h;
}

}  // namespace resdeloc
