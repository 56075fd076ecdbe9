#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "resdeloc/model.hpp"
#include "resdeloc/parallel.hpp"
#include "resdeloc/resolvent.hpp"
#include "resdeloc/tree_green.hpp"

namespace resdeloc {

struct GammaPoint {
  double eta = 0.0;
  double gamma_sum = 0.0;  // sum_y |G(x,y)|^2 (plus boundary leakage on trees)
  double gamma_im = 0.0;   // Im G(x,x) / eta
  double kappa = 0.0;      // -Im(1/G(x,x)) / eta
  cplx G;
};

/// gamma_x(E; eta) along the ladder, largest eta first.
struct GammaTrace {
  VertexId x = 0;
  double E = 0.0;
  std::vector<GammaPoint> points;
};

/// Dense route; both gamma routes and the kappa identity are enforced
/// (relative gap > 1e-8 throws IntegrityError), as is monotonicity in eta.
GammaTrace gamma(const Eigen::MatrixXd& h, VertexId x, double E, const EtaLadder& ladder);
/// Same data viewed as kappa_eta; kappa * |G|^2 == gamma is checked.
GammaTrace kappa(const Eigen::MatrixXd& h, VertexId x, double E, const EtaLadder& ladder);

/// Tree route at the root; pools[k] must match ladder rung k when the
/// boundary is stationary.
GammaTrace gamma_tree(const OperatorModel& model, const PotentialSample& sample, double E,
                      const EtaLadder& ladder, TreeBoundary boundary,
                      const std::vector<BoundaryPool>* pools);

struct DivergenceThresholds {
  double p_min = 0.5;
  double r2_min = 0.99;
  double plateau_rel = 0.01;
  int fit_rungs = 6;
  int plateau_rungs = 4;
};

enum class Verdict { diverging, finite, inconclusive };
std::string to_string(Verdict v);

struct DivergenceVerdict {
  Verdict verdict = Verdict::inconclusive;
  double p = 0.0;   // gamma ~ eta^-p over the last fit_rungs
  double r2 = 0.0;
  double plateau = 0.0;  // last gamma when finite
};

DivergenceVerdict divergence_verdict(const std::vector<double>& etas, const std::vector<double>& values,
                                     const DivergenceThresholds& th = {});
DivergenceVerdict divergence_verdict(const GammaTrace& trace, const DivergenceThresholds& th = {});

enum class DosEstimator { plain, spectral_average };

struct DosEstimate {
  double E = 0.0;
  double eta = 0.0;
  double n_hat = 0.0;
  double stderr_ = 0.0;
  double wegner_bound = 0.0;  // sup density of lambda V
  bool wegner_ok = false;     // n_hat <= bound + 3 stderr
};

struct DosOptions {
  DosEstimator estimator = DosEstimator::plain;
  TreeBoundary boundary = TreeBoundary::stationary;
  Exec exec;
};

/// n(E) = (1/pi) E[Im G(0,0;E+i eta)] at the origin. The spectral-average
/// estimator integrates V(0) out analytically (uniform and cauchy only).
std::vector<DosEstimate> dos_scan(const OperatorModel& model, const std::vector<double>& energies,
                                  double eta, int replicates, const DosOptions& opt = {});
DosEstimate dos(const OperatorModel& model, double E, double eta, int replicates, const DosOptions& opt = {});

/// (1/pi) E_V[Im 1/(V - Sigma)] over V ~ law, for Im Sigma >= 0.
double averaged_spectral_density(const Distribution& law, cplx sigma);

struct EnergyClassification {
  double E = 0.0;
  double frac_diverging = 0.0;
  double frac_finite = 0.0;
  double frac_inconclusive = 0.0;
  double frac_ac = 0.0;
  int replicates = 0;
};

struct ClassifyOptions {
  EtaLadder ladder;
  DivergenceThresholds thresholds;
  TreeBoundary boundary = TreeBoundary::stationary;
  Exec exec;
};

/// Per-replicate verdicts at the origin, aggregated per energy.
std::vector<EnergyClassification> classify_energies(const OperatorModel& model, const std::vector<double>& energies,
                                                    int replicates, const ClassifyOptions& opt = {});
EnergyClassification classify_energy(const OperatorModel& model, double E, int replicates,
                                     const ClassifyOptions& opt = {});

/// Uniform grid on [lo, hi] shifted by 1e-4 * sqrt(2) to miss exact eigenvalues of A.
std::vector<double> energy_grid(double lo, double hi, int count);

}  // namespace resdeloc
