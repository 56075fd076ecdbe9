#include "resdeloc/resolvent.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "resdeloc/errors.hpp"

namespace resdeloc {

namespace {

using Eigen::Index;

Index idx(VertexId v) { return static_cast<Index>(v); }

void require_site(const Eigen::MatrixXd& h, VertexId x) {
  if (x >= static_cast<VertexId>(h.rows())) throw std::out_of_range("site out of range");
}

Eigen::MatrixXcd shifted(const Eigen::MatrixXd& h, cplx z) {
  Eigen::MatrixXcd m = h.cast<cplx>();
  m.diagonal().array() -= z;
  return m;
}

void integrity(bool ok, const std::string& what, double gap) {
  if (ok) return;
  std::ostringstream os;
  os << what << " (gap " << gap << ")";
  throw IntegrityError(os.str());
}

}  // namespace

double rel_gap(cplx a, cplx b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

bool close_rel(cplx a, cplx b, double tol) { return rel_gap(a, b) <= tol; }

ComplexEnergy::ComplexEnergy(double e, double eta_) : E(e), eta(eta_) {
  if (!(eta_ > 0)) throw std::invalid_argument("eta must be > 0");
}

double EtaLadder::eta(int k) const { return std::ldexp(eta0, -k); }

std::vector<double> EtaLadder::values() const {
  if (!(eta0 > 0)) throw std::invalid_argument("ladder eta0 must be > 0");
  if (rungs < 1) throw std::invalid_argument("ladder needs at least one rung");
  std::vector<double> out(static_cast<std::size_t>(rungs));
  for (int k = 0; k < rungs; ++k) out[static_cast<std::size_t>(k)] = eta(k);
  return out;
}

Resolvent::Resolvent(const Eigen::MatrixXd& h, ComplexEnergy z) : h_(&h), z_(z) {
  if (h.rows() != h.cols()) throw std::invalid_argument("Resolvent: H must be square");
  if (!(z.eta > 0)) throw std::invalid_argument("Resolvent: eta must be > 0");
  lu_.compute(shifted(h, z.z()));
}

Eigen::VectorXcd Resolvent::column(VertexId x) const {
  require_site(*h_, x);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(h_->rows());
  rhs(idx(x)) = 1.0;
  return lu_.solve(rhs);
}

GreenColumn green_column(const Resolvent& r, VertexId x) {
  GreenColumn col;
  col.source = x;
  col.z = r.energy();
  col.values = r.column(x);
  Eigen::VectorXcd res = shifted(r.h(), r.energy().z()) * col.values;
  res(idx(x)) -= 1.0;
  col.residual_norm = res.norm();
  const double gnorm = col.values.norm();
  if (!(col.residual_norm <= 1e-10 * gnorm)) {
    std::ostringstream os;
    os << "green_column: residual " << col.residual_norm << " exceeds 1e-10*||g|| (||g|| = " << gnorm
       << ", eta = " << r.energy().eta << ")";
    throw IntegrityError(os.str());
  }
  return col;
}

GreenColumn green_column(const Eigen::MatrixXd& h, VertexId x, ComplexEnergy z) {
  require_site(h, x);
  return green_column(Resolvent(h, z), x);
}

cplx self_energy(const Eigen::MatrixXd& h, VertexId x, ComplexEnergy z) {
  const auto col = green_column(h, x, z);
  return h(idx(x), idx(x)) - 1.0 / col.values(idx(x));
}

cplx self_energy_restricted(const Eigen::MatrixXd& h, VertexId x, ComplexEnergy z) {
  require_site(h, x);
  const Index n = h.rows();
  if (n == 1) return z.z();
  std::vector<Index> rest;
  for (Index i = 0; i < n; ++i)
    if (i != idx(x)) rest.push_back(i);
  const Index m = static_cast<Index>(rest.size());
  Eigen::MatrixXcd q(m, m);
  Eigen::VectorXcd b(m);
  for (Index i = 0; i < m; ++i) {
    b(i) = h(rest[static_cast<std::size_t>(i)], idx(x));
    for (Index j = 0; j < m; ++j) q(i, j) = h(rest[static_cast<std::size_t>(i)], rest[static_cast<std::size_t>(j)]);
    q(i, i) -= z.z();
  }
  const Eigen::VectorXcd sol = q.partialPivLu().solve(b);
  return z.z() + (b.transpose() * sol).value();
}

SchurData schur_elimination(const Eigen::MatrixXd& h, VertexId x, VertexId y, ComplexEnergy z) {
  require_site(h, x);
  require_site(h, y);
  if (x == y) throw std::invalid_argument("schur_elimination requires x != y");
  const Index n = h.rows();
  std::vector<Index> rest;
  for (Index i = 0; i < n; ++i)
    if (i != idx(x) && i != idx(y)) rest.push_back(i);
  const Index m = static_cast<Index>(rest.size());

  Eigen::Matrix2cd s;
  s << h(idx(x), idx(x)) - z.z(), h(idx(x), idx(y)), h(idx(y), idx(x)), h(idx(y), idx(y)) - z.z();
  if (m > 0) {
    Eigen::MatrixXcd q(m, m);
    Eigen::MatrixXcd b(m, 2);
    for (Index i = 0; i < m; ++i) {
      const Index ri = rest[static_cast<std::size_t>(i)];
      b(i, 0) = h(ri, idx(x));
      b(i, 1) = h(ri, idx(y));
      for (Index j = 0; j < m; ++j) q(i, j) = h(ri, rest[static_cast<std::size_t>(j)]);
      q(i, i) -= z.z();
    }
    s -= b.transpose() * q.partialPivLu().solve(b);
  }
  SchurData d;
  d.x = x;
  d.y = y;
  d.z = z;
  d.sigma_x = h(idx(x), idx(x)) - s(0, 0);
  d.sigma_y = h(idx(y), idx(y)) - s(1, 1);
  d.tau_xy = -s(0, 1);
  d.tau_yx = -s(1, 0);
  // Sigma_x from the same elimination, one more rank-one step.
  d.Sigma_x = d.sigma_x + d.tau_xy * d.tau_yx / (h(idx(y), idx(y)) - d.sigma_y);
  return d;
}

namespace {

SchurData schur_from_block(const Eigen::MatrixXd& h, VertexId x, VertexId y, ComplexEnergy z,
                           const Eigen::VectorXcd& gx, const Eigen::VectorXcd& gy) {
  Eigen::Matrix2cd block;
  block << gx(idx(x)), gy(idx(x)), gx(idx(y)), gy(idx(y));
  if (block.determinant() == cplx(0.0)) throw IntegrityError("schur_two_site: singular Green block");
  const Eigen::Matrix2cd inv = block.inverse();
  SchurData d;
  d.x = x;
  d.y = y;
  d.z = z;
  d.sigma_x = h(idx(x), idx(x)) - inv(0, 0);
  d.sigma_y = h(idx(y), idx(y)) - inv(1, 1);
  d.tau_xy = -inv(0, 1);
  d.tau_yx = -inv(1, 0);
  d.Sigma_x = h(idx(x), idx(x)) - 1.0 / gx(idx(x));
  return d;
}

void check_schur(const Eigen::MatrixXd& h, SchurData& d, VertexId origin) {
  const SchurData e = schur_elimination(h, d.x, d.y, d.z);
  d.elimination_mismatch = std::max({rel_gap(d.sigma_x, e.sigma_x), rel_gap(d.sigma_y, e.sigma_y),
                                     rel_gap(d.tau_xy, e.tau_xy), rel_gap(d.tau_yx, e.tau_yx)});
  integrity(d.elimination_mismatch <= 1e-10, "schur_two_site: block inverse disagrees with elimination",
            d.elimination_mismatch);
  if (d.y == origin) {
    const cplx rhs = d.sigma_x + d.tau_xy * d.tau_yx / (h(idx(d.y), idx(d.y)) - d.sigma_y);
    d.sigma_identity_residual = rel_gap(d.Sigma_x, rhs);
    integrity(d.sigma_identity_residual <= 1e-10, "schur_two_site: Sigma/sigma/tau identity violated",
              d.sigma_identity_residual);
  }
}

}  // namespace

SchurData schur_two_site(const Resolvent& r, VertexId x, VertexId y, bool check, VertexId origin) {
  if (x == y) throw std::invalid_argument("schur_two_site requires x != y");
  SchurData d = schur_from_block(r.h(), x, y, r.energy(), r.column(x), r.column(y));
  if (check) check_schur(r.h(), d, origin);
  return d;
}

SchurData schur_two_site(const Eigen::MatrixXd& h, VertexId x, VertexId y, ComplexEnergy z, bool check,
                         VertexId origin) {
  require_site(h, x);
  require_site(h, y);
  return schur_two_site(Resolvent(h, z), x, y, check, origin);
}

cplx g_ratio(const Eigen::MatrixXd& h, VertexId x, ComplexEnergy z, bool check, VertexId origin) {
  require_site(h, x);
  require_site(h, origin);
  const Resolvent r(h, z);
  const Eigen::VectorXcd g0 = r.column(origin);
  const cplx g = g0(idx(x)) / g0(idx(origin));
  if (x == origin || !check) return g;
  const SchurData d = schur_from_block(h, origin, x, z, g0, r.column(x));
  const cplx via_tau = d.tau_xy / (h(idx(x), idx(x)) - d.sigma_y);
  integrity(close_rel(g, via_tau, 1e-10), "g_ratio: G(0,x)/G(0,0) != tau(0,x)/(V(x)-sigma(x))",
            rel_gap(g, via_tau));
  return g;
}

}  // namespace resdeloc
