#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "resdeloc/graph.hpp"

namespace resdeloc {

using cplx = std::complex<double>;

/// z = E + i eta with eta > 0; eta -> 0 limits are always taken along a ladder.
struct ComplexEnergy {
  double E = 0.0;
  double eta = 1e-3;

  ComplexEnergy() = default;
  ComplexEnergy(double e, double eta_);
  cplx z() const { return {E, eta}; }
};

/// eta_k = eta0 * 2^-k, k = 0..rungs-1.
struct EtaLadder {
  double eta0 = 0.1;
  int rungs = 14;

  double eta(int k) const;
  double eta_min() const { return eta(rungs - 1); }
  std::vector<double> values() const;
};

/// LU factorization of H - z for repeated column solves.
class Resolvent {
 public:
  Resolvent(const Eigen::MatrixXd& h, ComplexEnergy z);
  Eigen::VectorXcd column(VertexId x) const;
  ComplexEnergy energy() const { return z_; }
  const Eigen::MatrixXd& h() const { return *h_; }

 private:
  const Eigen::MatrixXd* h_;
  ComplexEnergy z_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

struct GreenColumn {
  VertexId source = 0;
  ComplexEnergy z;
  Eigen::VectorXcd values;
  double residual_norm = 0.0;
};

/// Solves (H - z) g = delta_x. Throws IntegrityError if the residual exceeds
/// 1e-10 * ||g||.
GreenColumn green_column(const Eigen::MatrixXd& h, VertexId x, ComplexEnergy z);
GreenColumn green_column(const Resolvent& r, VertexId x);

/// Sigma(x;z) = V(x) - 1/G(x,x;z).
cplx self_energy(const Eigen::MatrixXd& h, VertexId x, ComplexEnergy z);
/// Sigma(x;z) = z + <h_x, (H_Q - z)^{-1} h_x> with Q the complement of {x}.
cplx self_energy_restricted(const Eigen::MatrixXd& h, VertexId x, ComplexEnergy z);

/// Rank-two Schur data for the pair (x, y): the inverse of the 2x2 block of
/// Green entries equals [[V(x)-sigma_x, -tau_xy], [-tau_yx, V(y)-sigma_y]].
struct SchurData {
  VertexId x = 0;
  VertexId y = 0;
  ComplexEnergy z;
  cplx Sigma_x;
  cplx sigma_x;
  cplx sigma_y;
  cplx tau_xy;
  cplx tau_yx;
  /// max relative gap to direct elimination (0 unless checked)
  double elimination_mismatch = 0.0;
  /// residual of Sigma_x = sigma_x + tau_xy tau_yx / (V(y) - sigma_y) (checked when y is the origin)
  double sigma_identity_residual = 0.0;
};

/// Reads Schur data off the Green block. With check = true also runs the
/// direct elimination of the complement and, when y == origin, the
/// Sigma/sigma/tau identity; a gap above 1e-10 throws IntegrityError.
SchurData schur_two_site(const Eigen::MatrixXd& h, VertexId x, VertexId y, ComplexEnergy z,
                         bool check = true, VertexId origin = 0);
SchurData schur_two_site(const Resolvent& r, VertexId x, VertexId y, bool check = false,
                         VertexId origin = 0);
/// Independent route: eliminate every site except x and y.
SchurData schur_elimination(const Eigen::MatrixXd& h, VertexId x, VertexId y, ComplexEnergy z);

/// g(x) = G(0,x)/G(0,0). With check = true the identity
/// g = tau(0,x) / (V(x) - sigma(x)) is enforced at 1e-10.
cplx g_ratio(const Eigen::MatrixXd& h, VertexId x, ComplexEnergy z, bool check = true,
             VertexId origin = 0);

/// |a - b| <= tol * max(1, |a|, |b|)
bool close_rel(cplx a, cplx b, double tol);
double rel_gap(cplx a, cplx b);

}  // namespace resdeloc
