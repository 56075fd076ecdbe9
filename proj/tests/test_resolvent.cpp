#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "resdeloc/errors.hpp"
#include "resdeloc/model.hpp"
#include "resdeloc/resolvent.hpp"

using namespace resdeloc;

namespace {

Eigen::MatrixXd path(const std::vector<double>& v) {
  const Eigen::Index n = static_cast<Eigen::Index>(v.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = v[static_cast<std::size_t>(i)];
    if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = 1.0;
  }
  return h;
}

Eigen::MatrixXd random_box(std::uint64_t seed, std::vector<std::size_t> dims) {
  OperatorModel m{make_box(dims), Distribution::uniform(-1, 1), 2.0, seed, 1.0};
  return hamiltonian(m, sample_potential(m, 0));
}

bool near(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("scalar green function") {
  Eigen::MatrixXd h(1, 1);
  h(0, 0) = 2.0;
  const auto col = green_column(h, 0, ComplexEnergy(0.0, 1.0));
  CHECK(near(col.values(0), cplx(0.4, 0.2), 1e-15));
  CHECK(near(self_energy(h, 0, ComplexEnergy(0.3, 0.7)), cplx(0.3, 0.7), 1e-14));
  CHECK(near(self_energy_restricted(h, 0, ComplexEnergy(0.3, 0.7)), cplx(0.3, 0.7), 1e-15));
}

TEST_CASE("two-vertex path") {
  const Eigen::MatrixXd h = path({0, 0});
  const auto col = green_column(h, 0, ComplexEnergy(0.0, 1.0));
  CHECK(near(col.values(0), cplx(0, 0.5), 1e-15));
  CHECK(near(col.values(1), cplx(0.5, 0), 1e-15));

  const double v1 = 0.3, v2 = -0.8;
  const ComplexEnergy z(0.2, 0.05);
  const Eigen::MatrixXd h2 = path({v1, v2});
  CHECK(near(self_energy(h2, 0, z), z.z() + 1.0 / (v2 - z.z()), 1e-12));

  // The Green block is (H - z)^-1 itself: sigma = z, tau = -H(x,y).
  const SchurData d = schur_two_site(h2, 0, 1, z);
  CHECK(near(d.sigma_x, z.z(), 1e-12));
  CHECK(near(d.sigma_y, z.z(), 1e-12));
  CHECK(near(d.tau_xy, -1.0, 1e-12));
  CHECK(near(d.tau_yx, -1.0, 1e-12));

  const cplx g = g_ratio(h2, 1, z);
  CHECK(near(g, -1.0 / (v2 - z.z()), 1e-12));
  CHECK(near(g_ratio(h2, 0, z), 1.0, 0.0));
}

TEST_CASE("three-vertex path endpoints") {
  const double w = 0.4;
  const ComplexEnergy z(-0.1, 0.02);
  const Eigen::MatrixXd h = path({0.7, w, -0.2});
  const SchurData d = schur_two_site(h, 0, 2, z);
  CHECK(near(d.sigma_x, z.z() + 1.0 / (w - z.z()), 1e-12));
  CHECK(near(d.sigma_y, z.z() + 1.0 / (w - z.z()), 1e-12));
  CHECK(near(d.tau_xy, 1.0 / (w - z.z()), 1e-12));
  const SchurData e = schur_elimination(h, 0, 2, z);
  CHECK(near(e.tau_xy, d.tau_xy, 1e-12));
}

TEST_CASE("residuals and identities on random instances") {
  const Eigen::MatrixXd h = random_box(3, {4, 5});
  for (double eta : {1e-1, 1e-3, 1e-6}) {
    const ComplexEnergy z(0.37, eta);
    const Resolvent r(h, z);
    for (VertexId x : {0u, 7u, 19u}) {
      const auto col = green_column(r, x);
      CHECK(col.residual_norm <= 1e-10 * col.values.norm());
      CHECK(col.values(static_cast<Eigen::Index>(x)).imag() > 0.0);
      const double sum = col.values.squaredNorm();
      CHECK(rel_gap(sum, col.values(static_cast<Eigen::Index>(x)).imag() / eta) <= 1e-10);
    }
    const auto c3 = r.column(3), c11 = r.column(11);
    CHECK(rel_gap(c3(11), c11(3)) <= 1e-10);
    CHECK(rel_gap(self_energy(h, 7, z), self_energy_restricted(h, 7, z)) <= 1e-10);
  }
}

TEST_CASE("schur data on a 30-vertex instance") {
  const Eigen::MatrixXd h = random_box(5, {5, 6});
  const ComplexEnergy z(-0.6, 1e-4);
  const SchurData d = schur_two_site(h, 13, 0, z, true, 0);
  CHECK(d.elimination_mismatch <= 1e-10);
  CHECK(d.sigma_identity_residual <= 1e-10);
  CHECK(std::abs(d.tau_xy - d.tau_yx) <= 1e-10 * std::abs(d.tau_xy));
  CHECK_NOTHROW(g_ratio(h, 22, z, true, 0));
}

TEST_CASE("self-energies ignore the excluded site") {
  OperatorModel m{make_box({4, 4}), Distribution::uniform(-1, 1), 1.0, 8, 1.0};
  const auto s = sample_potential(m, 0);
  const ComplexEnergy z(0.1, 1e-3);
  const auto s2 = conditional_resample(s, 6, 2.5);
  const Eigen::MatrixXd h = hamiltonian(m, s), h2 = hamiltonian(m, s2);
  CHECK(rel_gap(self_energy(h, 6, z), self_energy(h2, 6, z)) <= 1e-9);
  const SchurData a = schur_two_site(h, 6, 0, z), b = schur_two_site(h2, 6, 0, z);
  CHECK(rel_gap(a.sigma_x, b.sigma_x) <= 1e-9);
  CHECK(rel_gap(a.sigma_y, b.sigma_y) <= 1e-9);
  CHECK(rel_gap(a.tau_xy, b.tau_xy) <= 1e-9);
}

TEST_CASE("argument checks") {
  const Eigen::MatrixXd h = path({0, 0, 0});
  CHECK_THROWS_AS(ComplexEnergy(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(schur_two_site(h, 1, 1, ComplexEnergy(0, 1)), std::invalid_argument);
  CHECK_THROWS_AS(green_column(h, 3, ComplexEnergy(0, 1)), std::out_of_range);
  EtaLadder bad{0.1, 0};
  CHECK_THROWS_AS(bad.values(), std::invalid_argument);
  const EtaLadder ladder{0.1, 4};
  CHECK(ladder.values() == std::vector<double>{0.1, 0.05, 0.025, 0.0125});
  CHECK(close_rel(1.0, 1.0 + 1e-12, 1e-10));
}
