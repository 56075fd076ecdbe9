#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "resdeloc/asymptotics.hpp"

using namespace resdeloc;

namespace {

OperatorModel tree(int K, int D, double lambda, double a = -0.5, double b = 0.5) {
  return {make_tree(K, D), Distribution::uniform(a, b), lambda, 1, 1.0};
}

}  // namespace

TEST_CASE("zero-disorder Lyapunov constants") {
  const OperatorModel k2 = tree(2, 14, 0.0);
  CHECK(std::abs(lyapunov_L0(k2, 0.0, 1).L0 / std::log(std::sqrt(2.0)) - 1) < 0.02);
  CHECK(std::abs(lyapunov_L0(k2, 3.0, 1).L0 / std::log(2.0) - 1) < 0.05);
  CHECK(std::abs(lyapunov_L0(k2, -3.0, 1).L0 / std::log(2.0) - 1) < 0.05);
  DecayOptions o;
  o.d_min = 6;
  o.d_max = 10;
  const OperatorModel k3 = tree(3, 12, 0.0);
  CHECK(std::abs(lyapunov_L0(k3, 0.0, 1, o).L0 / std::log(std::sqrt(3.0)) - 1) < 0.02);
}

TEST_CASE("L1 against L0") {
  const auto zero = lyapunov(tree(2, 12, 0.0), 0.5, 2, DecayOptions{6, 10});
  CHECK(zero.L1 == doctest::Approx(zero.L0).epsilon(1e-10));
  CHECK_FALSE(zero.flagged);
  for (double lambda : {1.0, 3.0}) {
    const auto est = lyapunov(tree(2, 12, lambda), 0.2, 20, DecayOptions{6, 10});
    CHECK(est.L1 <= est.L0 + 3 * std::hypot(est.L0_err, est.L1_err));
    CHECK(est.L1 >= std::log(std::sqrt(2.0)) - 3 * est.L1_err);
  }
  const auto only = exponent_L1(tree(2, 10, 1.0), 0.2, 5, DecayOptions{4, 8});
  CHECK(only.L0 == 0.0);
  CHECK(only.L1 > 0.0);
}

TEST_CASE("free energy at zero disorder") {
  const std::vector<double> s = {0.25, 0.5, 0.75, 1.0};
  const OperatorModel m = tree(2, 14, 0.0);
  const FreeEnergyCurve c = phi_s(m, 0.0, s, 1);
  const LyapunovEstimate l = lyapunov(m, 0.0, 1);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(c.phi[i] == doctest::Approx(-s[i] / 2).epsilon(0.02));
  CHECK(c.phi.back() == doctest::Approx(-l.L1 / std::log(2.0)).epsilon(1e-6));
  CHECK_THROWS_AS(phi_s(m, 0.0, {1.5}, 1), std::invalid_argument);
}

TEST_CASE("free energy is convex") {
  const std::vector<double> s = {0.2, 0.4, 0.6, 0.8, 1.0};
  const FreeEnergyCurve c = phi_s(tree(2, 11, 2.0), 0.1, s, 30, DecayOptions{4, 9});
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double second = c.phi[i + 1] - 2 * c.phi[i] + c.phi[i - 1];
    const double err = std::sqrt(c.phi_err[i + 1] * c.phi_err[i + 1] + 4 * c.phi_err[i] * c.phi_err[i] +
                                 c.phi_err[i - 1] * c.phi_err[i - 1]);
    CHECK(second >= -3 * err);
  }
}

TEST_CASE("phase verdicts") {
  DecayOptions o{4, 8};
  const PhaseVerdict free = phase_verdict(tree(2, 10, 0.0), 0.0, 0.5, 2, o);
  CHECK(free.verdict == Phase::delocalized);
  CHECK(free.deloc_test);
  CHECK(free.log_K == doctest::Approx(std::log(2.0)));
  CHECK(free.sum_trace.size() == 5);

  const PhaseVerdict edge = phase_verdict(tree(2, 10, 0.0), 3.0, 0.5, 2, o);
  CHECK(edge.verdict != Phase::delocalized);

  const PhaseVerdict strong = phase_verdict(tree(2, 10, 20.0, -1.0, 1.0), 0.0, 0.5, 20, o);
  CHECK(strong.verdict == Phase::localized);
  CHECK(strong.increment_slope < 0.0);
  CHECK_THROWS_AS(phase_verdict(tree(2, 10, 1.0), 0.0, 1.0, 2, o), std::invalid_argument);
}

TEST_CASE("phase scan rows") {
  DecayOptions o{4, 8};
  const std::vector<double> energies = {-3.5, -2.0, 0.0, 2.0, 3.5};
  const auto a = phase_scan(tree(2, 10, 0.0), energies, {0.0, 50.0}, 0.5, 16, o);
  REQUIRE(a.size() == 10);
  for (std::size_t i = 0; i < 5; ++i) {
    const bool inside = std::abs(energies[i]) < 2 * std::sqrt(2.0) - 0.2;
    CHECK((a[i].verdict == Phase::delocalized) == inside);
    CHECK(a[5 + i].verdict == Phase::localized);
  }
  o.exec = Exec::with_workers(4);
  const auto b = phase_scan(tree(2, 10, 0.0), energies, {0.0, 50.0}, 0.5, 16, o);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].lyap.L0 == b[i].lyap.L0);
    CHECK(a[i].increment_slope == b[i].increment_slope);
  }
}

TEST_CASE("window checks") {
  CHECK_THROWS_AS(lyapunov(tree(2, 8, 1.0), 0.0, 2, DecayOptions{4, 7}), std::invalid_argument);
  CHECK_THROWS_AS(lyapunov(tree(2, 8, 1.0), 0.0, 2, DecayOptions{4, 6}), std::invalid_argument);
  OperatorModel box{make_box({5, 5}), Distribution::uniform(-1, 1), 1.0, 1, 1.0};
  CHECK_THROWS_AS(lyapunov(box, 0.0, 2, DecayOptions{1, 4}), std::invalid_argument);
}
