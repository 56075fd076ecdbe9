#pragma once

#include <string>
#include <vector>

#include "resdeloc/model.hpp"
#include "resdeloc/parallel.hpp"
#include "resdeloc/stats.hpp"
#include "resdeloc/tree_green.hpp"

namespace resdeloc {

struct DecayOptions {
  int d_min = 6;
  int d_max = 12;
  double eta = 1e-6;
  TreeBoundary boundary = TreeBoundary::stationary;
  std::size_t max_per_sphere = 4096;
  double r2_min = 0.98;
  Exec exec;
  StreamKey key;
};

/// Per-replicate shell averages of tau(0,x) over the distance window.
struct TauStatistics {
  std::vector<int> distances;
  std::vector<double> sphere_size;
  std::vector<double> s_values;
  // [replicate][distance]
  std::vector<std::vector<double>> mean_log;
  std::vector<std::vector<double>> mean_trunc;
  // [s][replicate][distance]: truncated and plain |tau|^s
  std::vector<std::vector<std::vector<double>>> mean_trunc_pow;
  std::vector<std::vector<std::vector<double>>> mean_pow;
  // [replicate]: density-of-states sample at the origin
  std::vector<double> dos;
};

TauStatistics collect_tau_statistics(const OperatorModel& model, double E, int replicates,
                                     const std::vector<double>& s_values, const DecayOptions& opt = {});

struct LyapunovEstimate {
  double E = 0.0;
  double lambda = 0.0;
  double L0 = 0.0;
  double L0_err = 0.0;
  double L1 = 0.0;
  double L1_err = 0.0;
  double r2_L0 = 0.0;
  double r2_L1 = 0.0;
  int d_min = 0;
  int d_max = 0;
  bool flagged = false;  // some fit below r2_min
};

LyapunovEstimate lyapunov_from(const TauStatistics& st, double E, double lambda, const DecayOptions& opt);
LyapunovEstimate lyapunov(const OperatorModel& model, double E, int replicates, const DecayOptions& opt = {});
/// L0 only (L1 fields left at zero).
LyapunovEstimate lyapunov_L0(const OperatorModel& model, double E, int replicates, const DecayOptions& opt = {});
/// L1 only (L0 fields left at zero).
LyapunovEstimate exponent_L1(const OperatorModel& model, double E, int replicates, const DecayOptions& opt = {});

struct FreeEnergyCurve {
  double E = 0.0;
  double lambda = 0.0;
  std::vector<double> s;
  std::vector<double> phi;
  std::vector<double> phi_err;
  std::vector<double> r2;
};

/// phi(s) = slope of log E[min(|tau|,1)^s] against chi(d). Requires s in (0,1].
FreeEnergyCurve phi_s(const OperatorModel& model, double E, const std::vector<double>& s_grid, int replicates,
                      const DecayOptions& opt = {});

enum class Phase { delocalized, localized, inconclusive };
std::string to_string(Phase p);

struct PhaseVerdict {
  double E = 0.0;
  double lambda = 0.0;
  double s = 0.5;
  Phase verdict = Phase::inconclusive;
  LyapunovEstimate lyap;
  double log_K = 0.0;
  MeanEstimate n_E;
  bool deloc_test = false;
  bool loc_test = false;
  std::vector<double> sum_trace;  // partial sums S_R over the window
  double increment_slope = 0.0;   // of log(S_R - S_{R-1}) against R
  double increment_slope_err = 0.0;
  std::string error;
};

/// Delocalization test: L0 + 3 err < log K together with n(E) above noise
/// and a 1e-4 floor. Localization test: the increments S_R - S_{R-1} of the
/// fractional-moment sum decay geometrically (slope + 3 err < 0). Exactly one
/// passing test decides; otherwise inconclusive.
PhaseVerdict phase_verdict(const OperatorModel& model, double E, double s, int replicates,
                           const DecayOptions& opt = {});

/// One phase_verdict per (E, lambda) cell with streams keyed by the cell
/// indices. Cell errors are recorded in the row.
std::vector<PhaseVerdict> phase_scan(const OperatorModel& base, const std::vector<double>& energies,
                                     const std::vector<double>& lambdas, double s, int replicates,
                                     const DecayOptions& opt = {});

}  // namespace resdeloc
