#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "resdeloc/distribution.hpp"
#include "resdeloc/graph.hpp"

namespace resdeloc {

/// H = A + lambda V with A = hopping * adjacency(graph).
struct OperatorModel {
  Graph graph;
  Distribution dist;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  double hopping = 1.0;

  /// Sup of the density of lambda*V (the Wegner line); +inf for lambda = 0.
  double effective_density_sup() const;
};

/// One disorder realization. `values` already holds the effective lambda*V(x).
struct PotentialSample {
  std::vector<double> values;
  std::uint64_t replicate = 0;
  std::string seed_path;
  /// (tag, path..., replicate): keys any auxiliary per-realization stream.
  std::vector<std::uint64_t> stream_key;
};

/// Extra stream key for samples that must not reuse the default replicate
/// streams (calibration, phase-scan cells).
struct StreamKey {
  StreamTag tag = StreamTag::potential;
  std::vector<std::uint64_t> path;
};

/// Draws V(x) in vertex order from the stream (seed, key, replicate), so a
/// depth-D tree realization is a prefix of the depth-(D+1) one.
PotentialSample sample_potential(const OperatorModel& model, std::uint64_t replicate,
                                 const StreamKey& key = {});

/// Copy with V(x) := value (value is the effective potential).
PotentialSample conditional_resample(const PotentialSample& sample, VertexId x, double value);

Eigen::MatrixXd hopping_matrix(const OperatorModel& model);
Eigen::MatrixXd hamiltonian(const OperatorModel& model, const PotentialSample& sample);

}  // namespace resdeloc
