#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "resdeloc/errors.hpp"
#include "resdeloc/resonance.hpp"

using namespace resdeloc;

namespace {

ResonanceOptions with_boundary(TreeBoundary b) {
  ResonanceOptions o;
  o.boundary = b;
  return o;
}

}  // namespace

TEST_CASE("truncated mean at zero disorder is deterministic") {
  OperatorModel m{make_tree(2, 8), Distribution::uniform(-0.5, 0.5), 0.0, 1, 1.0};
  const auto opt = with_boundary(TreeBoundary::stationary);
  const ComplexEnergy z(0.4, opt.eta);
  const auto pool = make_pool(m, z, opt.boundary);
  const auto s = sample_potential(m, 0);
  const TreeGreen tg(m, s, z, opt.boundary, &*pool, true);
  for (auto [x, y] : {std::pair<VertexId, VertexId>{5, 40}, {0, 100}, {2, 3}}) {
    const MeanEstimate t = truncated_mean_T(m, x, y, 0.4, 5, opt);
    CHECK(t.stderr_ == 0.0);
    CHECK(t.mean == doctest::Approx(std::min(std::abs(tg.pair(x, y).tau), 1.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(truncated_mean_T(m, 3, 3, 0.0, 2, opt), std::invalid_argument);
}

TEST_CASE("truncated mean against the cutoff") {
  OperatorModel m{make_tree(2, 8), Distribution::uniform(-0.5, 0.5), 1.0, 3, 1.0};
  const ResonanceOptions opt;
  const CutoffFunction c = calibrate_cutoff(m, 0.5, 0.1, 6, 100, opt);
  const VertexId x = sphere(m.graph, 0, 6).members[17];
  const MeanEstimate t = truncated_mean_T(m, 0, x, 0.5, 400, opt);
  CHECK(t.mean <= 1.0);
  CHECK(t.mean >= 0.9 * c.at(6) - 3 * t.stderr_);
  const MeanEstimate near = truncated_mean_T(m, 0, 1, 0.5, 50, opt);
  CHECK(near.mean == 1.0);
}

TEST_CASE("zero-disorder cutoff") {
  OperatorModel m{make_tree(2, 10), Distribution::uniform(-0.5, 0.5), 0.0, 1, 1.0};
  const auto opt = with_boundary(TreeBoundary::stationary);
  const CutoffFunction c = calibrate_cutoff(m, 0.0, 0.1, 8, 3, opt);
  REQUIRE(c.t.size() == 9);
  CHECK(c.at(0) == 1.0);
  const ComplexEnergy z(0.0, opt.eta);
  const auto pool = make_pool(m, z, opt.boundary);
  const auto sample = sample_potential(m, 0);
  const TreeGreen tg(m, sample, z, opt.boundary, &*pool);
  for (int r = 2; r <= 8; ++r) {
    const VertexId x = sphere(m.graph, 0, r).members.back();
    CHECK(c.at(r) == doctest::Approx(std::min(std::abs(tg.tau_root(x)), 1.0)).epsilon(1e-12));
  }
  // even/odd oscillation; two-step rate
  CHECK(std::log(c.at(6) / c.at(8)) / 2 == doctest::Approx(0.5 * std::log(2.0)).epsilon(0.03));
}

TEST_CASE("cutoff is a lower quantile of the calibration set") {
  OperatorModel m{make_tree(2, 7), Distribution::uniform(-0.5, 0.5), 1.0, 8, 1.0};
  ResonanceOptions opt;
  opt.per_sphere = 1000;
  const double E = 0.3;
  const CutoffFunction c = calibrate_cutoff(m, E, 0.2, 5, 40, opt);
  const auto pool = make_pool(m, ComplexEnergy(E, opt.eta), opt.boundary);
  for (int d = 1; d <= 5; ++d) {
    const auto members = sphere(m.graph, 0, d).members;
    double above = 0, total = 0;
    for (std::uint64_t r = 0; r < 40; ++r) {
      const auto s = sample_potential(m, r, {StreamTag::calibration, {}});
      const TreeGreen tg(m, s, ComplexEnergy(E, opt.eta), opt.boundary, &*pool);
      for (VertexId x : members) {
        above += std::abs(tg.tau_root(x)) >= c.at(d);
        total += 1;
      }
    }
    CHECK(above / total >= 0.8);
  }
}

TEST_CASE("weak-disorder cutoff decay rate settles") {
  OperatorModel m{make_tree(2, 14), Distribution::uniform(-0.5, 0.5), 0.2, 5, 1.0};
  const CutoffFunction c = calibrate_cutoff(m, 0.5, 0.1, 14, 200, with_boundary(TreeBoundary::stationary));
  std::vector<double> inc;
  for (int d = 9; d <= 14; ++d) inc.push_back(std::log(c.at(d - 1) / c.at(d)));
  const double mean = mean_stderr(inc).mean;
  for (double r : inc) CHECK(std::abs(r / mean - 1) <= 0.1);
}

TEST_CASE("forced resonance") {
  OperatorModel m{make_tree(2, 9), Distribution::uniform(-0.5, 0.5), 0.2, 3, 1.0};
  const ResonanceOptions opt;
  const CutoffFunction c = calibrate_cutoff(m, 0.0, 0.1, 6, 50, opt);
  const auto pool = make_pool(m, ComplexEnergy(0.0, opt.eta), opt.boundary);
  const auto s = sample_potential(m, 0);
  const TreeGreen tg(m, s, ComplexEnergy(0.0, opt.eta), opt.boundary, &*pool, true);
  int e_hits = 0, n = 0;
  for (VertexId x : sphere(m.graph, 0, 6).members) {
    const cplx sigma = tg.self_energy(x);
    const auto forced = conditional_resample(s, x, sigma.real());
    const ResonanceEvents ev = detect_events(m, forced, x, 0.0, c, opt);
    CHECK(ev.resonance_gap == doctest::Approx(std::abs(sigma.imag())).epsilon(1e-6));
    e_hits += ev.E;
    ++n;
    if (n == 24) break;
  }
  CHECK(e_hits >= 20);

  const ForcedResonanceStats st = forced_resonance_check(m, 0.0, c, {2, 4, 6}, 20, opt);
  CHECK(st.triple_events > 0);
  CHECK(st.min_g_abs >= 0.49);
}

TEST_CASE("zero disorder rarely resonates") {
  OperatorModel m{make_tree(2, 8), Distribution::uniform(-0.5, 0.5), 0.0, 1, 1.0};
  const auto opt = with_boundary(TreeBoundary::stationary);
  const CutoffFunction c = calibrate_cutoff(m, 0.3, 0.1, 6, 2, opt);
  const auto s = sample_potential(m, 0);
  int hits = 0;
  for (VertexId x : sphere(m.graph, 0, 6).members) hits += detect_events(m, s, x, 0.3, c, opt).E;
  CHECK(hits == 0);
}

TEST_CASE("g filter seam trips the integrity check") {
  OperatorModel m{make_tree(2, 8), Distribution::uniform(-0.5, 0.5), 0.2, 3, 1.0};
  ResonanceOptions opt;
  const CutoffFunction c = calibrate_cutoff(m, 0.0, 0.1, 5, 50, opt);
  opt.g_filter = [](cplx g) { return 0.1 * g / std::max(std::abs(g), 1.0); };
  CHECK_THROWS_AS(forced_resonance_check(m, 0.0, c, {3, 5}, 20, opt), IntegrityError);
}

TEST_CASE("Paley-Zygmund on synthetic counts") {
  const auto constant = paley_zygmund(std::vector<double>(50, 3.0), {0.5});
  REQUIRE(constant.size() == 1);
  CHECK(constant[0].prob == 1.0);
  CHECK(constant[0].bound == doctest::Approx(0.25));
  CHECK(constant[0].holds);
  std::vector<double> mixed;
  for (int i = 0; i < 1000; ++i) mixed.push_back(i % 10 == 0 ? 10.0 : 0.0);
  for (const PZPoint& p : paley_zygmund(mixed)) {
    CHECK(p.prob == doctest::Approx(0.1));
    CHECK(p.holds);
  }
}

TEST_CASE("resonance report moments") {
  OperatorModel m{make_tree(2, 8), Distribution::uniform(-0.5, 0.5), 0.2, 3, 1.0};
  ResonanceOptions opt;
  opt.ct_replicates = 20;
  const CutoffFunction c = calibrate_cutoff(m, 0.0, 0.1, 6, 100, opt);
  const ResonanceReport rep = resonance_report(m, 0.0, 6, 300, c, opt);
  CHECK(rep.counts.size() == 300);
  CHECK(rep.first_moment_ok);
  CHECK(rep.pz_ok);
  CHECK(rep.C_T > 0.0);
  CHECK(rep.rho_sup == doctest::Approx(5.0));
  CHECK(std::isfinite(rep.mean_abs_im_sigma_origin));
  if (!rep.degenerate) CHECK(rep.second_moment_ok);
  CHECK_THROWS_AS(resonance_report(m, 0.0, 6, 1, c, opt), std::invalid_argument);
}

TEST_CASE("conditions on the free tree") {
  OperatorModel m{make_tree(2, 10), Distribution::uniform(-0.5, 0.5), 0.0, 1, 1.0};
  auto opt = with_boundary(TreeBoundary::stationary);
  opt.ct_replicates = 2;
  const ConditionsA123 in = check_conditions_A123(m, 0.0, {4, 6, 8}, 0.1, 2, opt);
  CHECK(in.A1_growth);
  CHECK(in.cutoff_sum_log_slope == doctest::Approx(0.5 * std::log(2.0)).epsilon(0.06));
  CHECK(in.A3_positive);
  const ConditionsA123 out = check_conditions_A123(m, 4.0, {4, 6, 8}, 0.1, 2, opt);
  CHECK_FALSE(out.A1_growth);
  CHECK_FALSE(out.A3_positive);

  OperatorModel w{make_tree(2, 8), Distribution::uniform(-0.5, 0.5), 1.0, 2, 1.0};
  ResonanceOptions wo;
  wo.ct_replicates = 10;
  CHECK(check_conditions_A123(w, 0.5, {3, 6}, 0.1, 100, wo).A3_positive);
}

TEST_CASE("box route") {
  OperatorModel m{make_box({7, 7}), Distribution::uniform(-0.5, 0.5), 1.0, 3, 1.0};
  ResonanceOptions opt;
  opt.ct_replicates = 5;
  const CutoffFunction c = calibrate_cutoff(m, 0.3, 0.1, 3, 20, opt);
  CHECK(c.at(1) <= 1.0);
  const ResonanceReport rep = resonance_report(m, 0.3, 2, 30, c, opt);
  CHECK(rep.counts.size() == 30);
  CHECK(rep.min_g_abs >= 0.49);
}
