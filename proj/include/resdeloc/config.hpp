#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "resdeloc/diagnostics.hpp"
#include "resdeloc/distribution.hpp"
#include "resdeloc/graph.hpp"
#include "resdeloc/model.hpp"
#include "resdeloc/resolvent.hpp"
#include "resdeloc/tree_green.hpp"

namespace resdeloc {

enum class Command { green, dos, gamma_scan, resonance, lyapunov, phase_scan, verify_all };

std::string to_string(Command c);
/// Accepts the CLI spelling ("gamma-scan"); throws ConfigError on anything else.
Command command_from_string(const std::string& s);

struct TopologySpec {
  GraphKind kind = GraphKind::tree;
  int K = 2;
  int D = 10;
  std::vector<std::size_t> dims;
  std::size_t N = 0;
  std::vector<std::pair<VertexId, VertexId>> edges;
  VertexId origin = 0;
};

Graph build_graph(const TopologySpec& spec);

struct GreenParams {
  std::optional<VertexId> x;  // default: origin
  double E = 0.0;
  double eta = 1e-3;
  int replicates = 1;
};

struct DosParams {
  std::vector<double> energies;
  double eta = 1e-2;
  int replicates = 1000;
  DosEstimator estimator = DosEstimator::plain;
};

struct GammaScanParams {
  std::vector<double> energies;
  int replicates = 20;
};

struct ResonanceParams {
  double E = 0.0;
  int R = 6;
  double delta = 0.1;
  int replicates = 1000;
  int calibration_replicates = 200;
  double eta = 1e-6;
  int ct_replicates = 100;
  TreeBoundary boundary = TreeBoundary::real;
};

struct LyapunovParams {
  std::vector<double> energies;
  int replicates = 20;
  int d_min = 6;
  int d_max = 12;
  double eta = 1e-6;
};

struct PhaseScanParams {
  std::vector<double> energies;
  std::vector<double> lambdas;
  double s = 0.5;
  int replicates = 20;
  int d_min = 4;
  int d_max = 8;
  double eta = 1e-6;
};

struct VerifyAllParams {
  int identity_instances = 20;
  int rank_one_instances = 20;
  int mobius_scans = 5;
  int two_site_draws = 20;
  int delta_replicates = 200000;
  int simplicity_replicates = 200;
  int null_average_replicates = 2000;
};

struct RunConfig {
  Command command = Command::verify_all;
  TopologySpec topology;
  Distribution dist = Distribution::uniform(-0.5, 0.5);
  double lambda = 1.0;
  std::uint64_t seed = 1;
  double hopping = 1.0;
  int workers = 1;
  EtaLadder ladder;
  DivergenceThresholds thresholds;
  TreeBoundary boundary = TreeBoundary::stationary;

  GreenParams green;
  DosParams dos;
  GammaScanParams gamma_scan;
  ResonanceParams resonance;
  LyapunovParams lyapunov;
  PhaseScanParams phase_scan;
  VerifyAllParams verify_all;

  /// Every field with defaults filled, excluding workers; hashed into the digest.
  nlohmann::json canonical;
};

/// Parses and validates one JSON document. `command` overrides (or must agree
/// with) a "command" key in the document. Errors carry the field path.
RunConfig parse_config(std::string_view text, std::optional<Command> command = std::nullopt);

/// Re-validates cross-field constraints after CLI overrides.
void validate(RunConfig& config);

OperatorModel build_model(const RunConfig& config);

std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace resdeloc
