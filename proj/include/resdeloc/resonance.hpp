#pragma once

#include <functional>
#include <vector>

#include "resdeloc/diagnostics.hpp"
#include "resdeloc/model.hpp"
#include "resdeloc/parallel.hpp"
#include "resdeloc/stats.hpp"
#include "resdeloc/tree_green.hpp"

namespace resdeloc {

/// t(d) for d = 0..R_max; t(0) = 1.
struct CutoffFunction {
  double E = 0.0;
  double delta = 0.1;
  std::vector<double> t;

  double at(int d) const;
};

struct ResonanceOptions {
  TreeBoundary boundary = TreeBoundary::real;
  double eta = 1e-6;
  std::size_t per_sphere = 64;  // calibration subsample per sphere and replicate
  int ct_replicates = 100;
  int ct_sites = 8;
  int ct_partners = 64;
  Exec exec;
  /// Test seam: applied to every g before the |g| >= 0.49 check.
  std::function<cplx(cplx)> g_filter;
};

/// t(d) = delta-quantile of |tau(0,x;E)| pooled over the d-sphere and
/// replicates drawn from the calibration stream; clipped to (0,1].
CutoffFunction calibrate_cutoff(const OperatorModel& model, double E, double delta, int r_max, int replicates,
                                const ResonanceOptions& opt = {});

struct ResonanceEvents {
  VertexId x = 0;
  int distance = 0;
  bool T = false;
  bool E = false;
  bool N = false;
  double tau_abs = 0.0;        // |tau(0,x)|
  double resonance_gap = 0.0;  // |V(x) - Sigma(x)|
  double root_gap = 0.0;       // |V(0) - sigma(0)|
  double tau_back_abs = 0.0;   // |tau(x,0)|
  double g_abs = 0.0;          // |G(0,x)/G(0,0)|
  bool all() const { return T && E && N; }
};

/// Evaluates T_x, E_x, N_x at z = E + i eta. When all three hold, |g| >= 0.49
/// is enforced (IntegrityError otherwise).
ResonanceEvents detect_events(const OperatorModel& model, const PotentialSample& sample, VertexId x, double E,
                              const CutoffFunction& cutoff, const ResonanceOptions& opt = {});

/// E[min(|tau(x,y;E)|, 1)] over replicates.
MeanEstimate truncated_mean_T(const OperatorModel& model, VertexId x, VertexId y, double E, int replicates,
                              const ResonanceOptions& opt = {});

/// max over sampled x on the R-sphere of sum_y T(x,y) / sum_x t(0,x).
double estimate_CT(const OperatorModel& model, double E, int R, const CutoffFunction& cutoff,
                   const ResonanceOptions& opt = {});

struct PZPoint {
  double theta = 0.0;
  double prob = 0.0;   // P(N >= theta E[N])
  double bound = 0.0;  // (1-theta)^2 E[N]^2 / E[N^2]
  double stderr_ = 0.0;
  bool holds = false;
};

std::vector<PZPoint> paley_zygmund(const std::vector<double>& counts,
                                   const std::vector<double>& thetas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});

struct ResonanceReport {
  int R = 0;
  double E = 0.0;
  std::vector<int> counts;  // N_R per replicate
  MeanEstimate mean_N;
  double sphere_cutoff_sum = 0.0;  // sum_x t(0,x)
  MeanEstimate n_E;                // density of states at the origin
  double first_moment_bound = 0.0; // (n(E)/2) sum_x t
  bool first_moment_ok = false;
  double second_moment_ratio = 0.0;
  double second_moment_stderr = 0.0;
  double rho_sup = 0.0;
  double C_T = 0.0;
  double second_moment_bound = 0.0;  // 8 rho^2 (1 + C_T)
  bool second_moment_ok = false;
  std::vector<PZPoint> pz;
  bool pz_ok = false;
  double mean_abs_im_sigma_origin = 0.0;
  std::size_t triple_events = 0;
  double min_g_abs = 0.0;  // over triple events
  bool degenerate = false;
};

ResonanceReport resonance_report(const OperatorModel& model, double E, int R, int replicates,
                                 const CutoffFunction& cutoff, const ResonanceOptions& opt = {});

/// Forces V(x) := Re Sigma(x) at sampled sphere sites and checks |g| >= 0.49
/// whenever the three events then hold.
struct ForcedResonanceStats {
  std::size_t attempts = 0;
  std::size_t triple_events = 0;
  double min_g_abs = 0.0;
  double max_resonance_gap = 0.0;
};

ForcedResonanceStats forced_resonance_check(const OperatorModel& model, double E, const CutoffFunction& cutoff,
                                            const std::vector<int>& radii, int replicates,
                                            const ResonanceOptions& opt = {});

struct ConditionsA123 {
  std::vector<int> radii;
  std::vector<double> cutoff_sum;  // A1: sum_x t(0,x)
  std::vector<double> max_T;       // A1: max_x T(x,0) over sampled x
  std::vector<double> C_T;         // A2
  MeanEstimate n_E;                // A3; positive means above 3 stderr and above 1e-4
  double cutoff_sum_log_slope = 0.0;
  bool A1_growth = false;
  bool A1_T_decay = false;
  bool A3_positive = false;
};

ConditionsA123 check_conditions_A123(const OperatorModel& model, double E, const std::vector<int>& radii,
                                     double delta, int replicates, const ResonanceOptions& opt = {});

}  // namespace resdeloc
