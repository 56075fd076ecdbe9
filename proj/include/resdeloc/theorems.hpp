#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "resdeloc/diagnostics.hpp"
#include "resdeloc/distribution.hpp"
#include "resdeloc/model.hpp"
#include "resdeloc/parallel.hpp"
#include "resdeloc/resolvent.hpp"

namespace resdeloc {

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  double min_gap = 0.0;
  double residual = 0.0;        // max ||H phi - E phi|| / ||H||
  double orthonormality = 0.0;  // ||Phi^T Phi - I||_max
};

/// Throws IntegrityError when the residual exceeds 1e-9 or orthonormality 1e-10.
SpectralDecomposition spectral_decomposition(const Eigen::MatrixXd& h);

/// Rank-one placement of an eigenvalue: v = -1/<psi,(H0-E)^-1 psi> makes E an
/// eigenvalue of H0 + v|psi><psi| with eigenvector along (H0-E)^-1 psi and
/// spectral mass v^-2 / ||(H0-E)^-1 psi||^2.
struct RankOneReport {
  double v = 0.0;
  double eigen_distance = 0.0;
  double collinearity_sine = 0.0;
  double mass_observed = 0.0;
  double mass_formula = 0.0;
  double mass_gap = 0.0;
  double perturbed_distance = 0.0;  // for v(1 + 1e-3)
  bool passed = false;
};

RankOneReport verify_rank_one_eigen(const Eigen::MatrixXd& h0, const Eigen::VectorXd& psi, double E);

/// Scan of V(u) with F_x = -(1/eta) / G(x,x) fitted along the ladder.
struct MobiusScan {
  VertexId u = 0;
  VertexId x = 0;
  double E = 0.0;
  std::vector<double> V_grid;
  std::vector<double> exponent;
  std::vector<Verdict> verdicts;
  std::vector<double> im_F_min;  // Im F at the smallest eta
  std::vector<double> cluster_location;
  int clusters = 0;
  /// Real part of the pole of V -> F(V), from the cross ratio of three finite points.
  std::optional<double> predicted;
  /// |g(V4;V1,V2,V3) - cross ratio of the F images| at the smallest eta.
  double cross_ratio_gap = 0.0;
};

/// Throws std::runtime_error when fewer than three finite points are found.
MobiusScan mobius_dichotomy(const Eigen::MatrixXd& h, VertexId u, VertexId x, double E,
                            const std::vector<double>& V_grid, const EtaLadder& ladder = {},
                            const DivergenceThresholds& th = {});

/// A random instance where E is an eigenvalue of H with site x removed
/// exactly when V(u) = w_star, and w_star sits on the scan grid.
struct CrossingCase {
  Eigen::MatrixXd h;
  VertexId u = 0;
  VertexId x = 0;
  double E = 0.0;
  double w_star = 0.0;
  std::vector<double> V_grid;
};

CrossingCase make_crossing_case(std::uint64_t seed, std::uint64_t index, int grid_points = 101);

/// ((a-b)(c-d)) / ((a-c)(b-d))
cplx cross_ratio(cplx a, cplx b, cplx c, cplx d);

struct TwoSiteResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double quad_error = 0.0;  // |L_N - L_2N|
  int n_used = 0;
  bool holds = false;
  std::size_t w_bound_violations = 0;
  std::size_t interval_violations = 0;
  double swapped_lhs = 0.0;  // same measure with the integration order swapped
};

/// Measure under rho1(u) rho2(v) of {|G(x,x)| > 1/a and |G(y,y)| > 1/b} for
/// the two-site block with diagonal (u - sigma_x, v - sigma_y) and coupling
/// product gamma. Outer midpoint rule in one variable, exact intervals in
/// the other; N doubles until |L_N - L_2N| <= 0.01 rhs.
TwoSiteResult two_site_area_bound(const Distribution& rho1, const Distribution& rho2, cplx sigma_x, cplx sigma_y,
                                  cplx gamma, double a, double b, int n_start = 256, int n_max = 1 << 15);

struct DeltaPrincipleResult {
  std::vector<double> etas;
  std::vector<double> lhs;
  std::vector<double> lhs_err;
  double lhs_limit = 0.0;
  double lhs_limit_err = 0.0;
  double c = 0.0;
  double smoothed_inf = 0.0;
  double rhs = 0.0;
  double rhs_err = 0.0;
  bool holds = false;
};

/// LHS = E[(1/pi) Im 1/(V - X - i eta)] along the ladder; RHS =
/// c(delta) inf_eps (1/2eps) P(|V - X| <= eps). X == nullopt means X = 0.
DeltaPrincipleResult delta_principle(const Distribution& V, const std::optional<Distribution>& X, double delta,
                                     const EtaLadder& ladder, int replicates, std::uint64_t seed,
                                     double c_scale = 1.0);

struct SimplicityResult {
  double frac_degenerate = 0.0;
  std::vector<double> min_gaps;
};

SimplicityResult spectrum_simplicity(const OperatorModel& model, int replicates, double gap_tol = 1e-8,
                                     const Exec& exec = {});

struct NullAverageResult {
  double frac_hitting = 0.0;
  std::vector<double> exceptional_v;  // one per energy
  bool hypothesis_violated = false;
};

/// Fraction of draws v for which some E in S is an eigenvalue of H0 + v P_psi
/// (within 1e-8). `continuous_law` = false flags a law outside the lemma.
NullAverageResult spectral_null_average(const Eigen::MatrixXd& h0, const Eigen::VectorXd& psi,
                                        const std::vector<double>& energies,
                                        const std::function<double(Rng&)>& sampler, int replicates,
                                        std::uint64_t seed, bool continuous_law);

}  // namespace resdeloc

namespace resdeloc {

/// Largest relative gaps seen over random instances (graphs <= 64 vertices),
/// each pair checked on every ladder rung.
struct IdentityGaps {
  double rank_one = 0.0;   // V - 1/G(x,x) against the restricted resolvent
  double two_site = 0.0;   // Green-block inverse against direct elimination
  double sigma_tau = 0.0;  // Sigma(x) = sigma(x) + tau tau / (V(0) - sigma(0))
  double g_ratio = 0.0;    // G(0,x)/G(0,0) = tau(0,x) / (V(x) - sigma(x))
  double sum_rule = 0.0;   // sum_y |G(x,y)|^2 = Im G(x,x) / eta
  int instances = 0;
  int evaluations = 0;

  double max() const;
};

Eigen::MatrixXd random_instance(std::uint64_t seed, std::uint64_t index, VertexId* origin);

IdentityGaps exact_identity_suite(std::uint64_t seed, int instances, int rungs = 5, const Exec& exec = {});

}  // namespace resdeloc

namespace resdeloc {

struct RankOneCase {
  Eigen::MatrixXd h0;
  Eigen::VectorXd psi;
  double E = 0.0;
};

/// Random symmetric matrix of dimension 10..40, random unit psi, E midway
/// between two neighbouring eigenvalues.
RankOneCase make_rank_one_case(std::uint64_t seed, std::uint64_t index);

struct TwoSiteDraw {
  cplx sigma_x;
  cplx sigma_y;
  cplx gamma;
  double a = 0.0;
  double b = 0.0;
};

/// sigma with Im >= 0 (Herglotz), gamma anywhere in the plane, a, b in [0.01, 1].
TwoSiteDraw random_two_site_draw(std::uint64_t seed, std::uint64_t index);

}  // namespace resdeloc
