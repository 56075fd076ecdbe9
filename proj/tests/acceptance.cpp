// Acceptance run: one PASS/FAIL line per criterion. Optional arguments pick
// criteria by number, e.g. `acceptance 3 11`.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "resdeloc/asymptotics.hpp"
#include "resdeloc/diagnostics.hpp"
#include "resdeloc/errors.hpp"
#include "resdeloc/resonance.hpp"
#include "resdeloc/runner.hpp"
#include "resdeloc/theorems.hpp"

using namespace resdeloc;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Exec exec_all() { return Exec::with_workers(std::max(1, omp_get_num_procs())); }

// Shared by criteria 5, 7 and 8.
struct ResonanceRun {
  bool done = false;
  std::string error;
  ResonanceReport report;
  ForcedResonanceStats forced;
  double seconds = 0.0;
};

ResonanceRun& resonance_run() {
  static ResonanceRun run;
  if (run.done) return run;
  run.done = true;
  const auto t0 = std::chrono::steady_clock::now();
  const OperatorModel m{make_tree(2, 12), Distribution::uniform(-0.5, 0.5), 0.2, kSeed, 1.0};
  ResonanceOptions opt;
  opt.exec = exec_all();
  try {
    const CutoffFunction c = calibrate_cutoff(m, 0.0, 0.1, 10, 200, opt);
    run.report = resonance_report(m, 0.0, 10, 10000, c, opt);
    run.forced = forced_resonance_check(m, 0.0, c, {2, 3, 4, 5, 6, 7, 8, 9, 10}, 600, opt);
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

Outcome identities() {
  const IdentityGaps g = exact_identity_suite(kSeed, 100, 5, exec_all());
  std::ostringstream os;
  os << "instances " << g.instances << ", evaluations " << g.evaluations << ", max gaps: rank-one " << g.rank_one
     << ", two-site " << g.two_site << ", sigma-tau " << g.sigma_tau << ", g-ratio " << g.g_ratio << ", sum rule "
     << g.sum_rule;
  return {g.instances == 100 && g.max() <= 1e-10, os.str()};
}

Outcome rank_one() {
  double dist = 0, sine = 0, mass = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const RankOneCase c = make_rank_one_case(kSeed, i);
    const RankOneReport r = verify_rank_one_eigen(c.h0, c.psi, c.E);
    dist = std::max(dist, r.eigen_distance);
    sine = std::max(sine, r.collinearity_sine);
    mass = std::max(mass, r.mass_gap);
  }
  std::ostringstream os;
  os << "50 instances; max eigenvalue distance " << dist << ", collinearity sine " << sine << ", mass gap " << mass;
  return {dist <= 1e-8 && sine <= 1e-6 && mass <= 1e-8, os.str()};
}

Outcome lyapunov_constants() {
  struct Case {
    int K;
    double E, target, tol;
  };
  const Case cases[] = {{2, 0.0, std::log(std::sqrt(2.0)), 0.02},
                        {2, 3.0, std::log(2.0), 0.05},
                        {2, -3.0, std::log(2.0), 0.05},
                        {3, 0.0, std::log(std::sqrt(3.0)), 0.02}};
  bool ok = true;
  std::ostringstream os;
  for (const Case& c : cases) {
    const OperatorModel m{make_tree(c.K, 14), Distribution::uniform(-0.5, 0.5), 0.0, kSeed, 1.0};
    DecayOptions opt;
    opt.d_min = 6;
    opt.d_max = 12;
    const double L0 = lyapunov_L0(m, c.E, 1, opt).L0;
    const double rel = std::abs(L0 / c.target - 1);
    ok = ok && rel <= c.tol;
    os << "K=" << c.K << " E=" << c.E << ": L0 " << fmt("%.5f", L0) << " vs " << fmt("%.5f", c.target) << " ("
       << fmt("%.2f", 100 * rel) << "%); ";
  }
  return {ok, os.str()};
}

Outcome wegner() {
  const OperatorModel m{make_box({8, 8}), Distribution::uniform(-0.5, 0.5), 2.0, kSeed, 1.0};
  DosOptions opt;
  opt.exec = exec_all();
  const auto scan = dos_scan(m, energy_grid(-5, 5, 21), 1e-2, 10000, opt);
  int ok = 0;
  double worst = -1e300;
  for (const auto& e : scan) {
    ok += e.wegner_ok;
    worst = std::max(worst, (e.n_hat - e.wegner_bound) / std::max(e.stderr_, 1e-300));
  }
  std::ostringstream os;
  os << ok << "/21 energies within the bound " << scan.front().wegner_bound << "; max (n_hat - bound)/stderr "
     << fmt("%.2f", worst);
  return {ok == 21, os.str()};
}

Outcome g_bound() {
  const ResonanceRun& r = resonance_run();
  if (!r.error.empty()) return {false, "integrity failure: " + r.error};
  const std::size_t triples = r.report.triple_events + r.forced.triple_events;
  const double min_g = std::min(r.report.min_g_abs, r.forced.min_g_abs);
  std::ostringstream os;
  os << triples << " triple events (" << r.report.triple_events << " sampled, " << r.forced.triple_events
     << " forced), min |g| " << min_g << ", zero violations";
  return {triples >= 100000 && min_g >= 0.49, os.str()};
}

Outcome two_site() {
  const Distribution laws[][2] = {{Distribution::uniform(-1, 1), Distribution::uniform(-1, 1)},
                                  {Distribution::uniform(0, 1), Distribution::gaussian(0.5, 0.7)},
                                  {Distribution::gaussian(0, 1), Distribution::cauchy(0, 0.5)}};
  std::vector<TwoSiteResult> res = map_indexed<TwoSiteResult>(200, exec_all(), [&](std::size_t i) {
    const TwoSiteDraw d = random_two_site_draw(kSeed, i);
    const auto& pair = laws[i % 3];
    return two_site_area_bound(pair[0], pair[1], d.sigma_x, d.sigma_y, d.gamma, d.a, d.b);
  });
  int holds = 0;
  std::size_t wv = 0, iv = 0;
  double worst = 0;
  for (const auto& r : res) {
    holds += r.holds;
    wv += r.w_bound_violations;
    iv += r.interval_violations;
    worst = std::max(worst, r.lhs / r.rhs);
  }
  std::ostringstream os;
  os << holds << "/200 draws hold, max lhs/rhs " << fmt("%.4f", worst) << ", w-bound violations " << wv
     << ", interval violations " << iv;
  return {holds == 200 && wv == 0 && iv == 0, os.str()};
}

Outcome second_moment() {
  const ResonanceRun& r = resonance_run();
  if (!r.error.empty()) return {false, "integrity failure: " + r.error};
  const ResonanceReport& rep = r.report;
  double pz_worst = 1e300;
  for (const PZPoint& p : rep.pz) pz_worst = std::min(pz_worst, p.prob - p.bound + 3 * p.stderr_);
  std::ostringstream os;
  os << "PZ " << (rep.pz_ok ? "holds" : "fails") << " at all theta (min margin " << fmt("%.4f", pz_worst)
     << "); E[N(N-1)]/E[N]^2 = " << fmt("%.3f", rep.second_moment_ratio) << " +- "
     << fmt("%.3f", rep.second_moment_stderr) << " vs 8 rho^2 (1 + C_T) = " << fmt("%.1f", rep.second_moment_bound)
     << " (C_T " << fmt("%.2f", rep.C_T) << "); mean |Im Sigma(0)| " << rep.mean_abs_im_sigma_origin;
  return {rep.pz_ok && rep.second_moment_ok && !rep.degenerate, os.str()};
}

Outcome first_moment() {
  const ResonanceRun& r = resonance_run();
  if (!r.error.empty()) return {false, "integrity failure: " + r.error};
  const ResonanceReport& rep = r.report;
  std::ostringstream os;
  os << "E[N_R] = " << fmt("%.4f", rep.mean_N.mean) << " +- " << fmt("%.4f", rep.mean_N.stderr_)
     << " vs (n(E)/2) sum t = " << fmt("%.4f", rep.first_moment_bound) << " (n(E) " << fmt("%.4f", rep.n_E.mean)
     << ", sum t " << fmt("%.4f", rep.sphere_cutoff_sum) << ")";
  return {rep.first_moment_ok, os.str()};
}

Outcome simplicity() {
  const Exec ex = exec_all();
  std::vector<std::pair<VertexId, VertexId>> path;
  for (VertexId i = 0; i + 1 < 8; ++i) path.emplace_back(i, i + 1);
  const OperatorModel models[] = {
      {make_custom(8, path), Distribution::uniform(0, 1), 1.0, kSeed, 1.0},
      {make_box({4, 4}), Distribution::gaussian(0, 1), 1.0, kSeed, 1.0},
      {make_tree(2, 3), Distribution::uniform(-1, 1), 0.5, kSeed, 1.0},
      {make_box({8, 8}), Distribution::cauchy(0, 1), 1.0, kSeed, 1.0}};
  double worst = 0;
  double min_gap = 1e300;
  for (const auto& m : models) {
    const SimplicityResult r = spectrum_simplicity(m, 250, 1e-8, ex);
    worst = std::max(worst, r.frac_degenerate);
    for (double g : r.min_gaps) min_gap = std::min(min_gap, g);
  }
  const OperatorModel bern{make_complete(2), Distribution::bernoulli(0.5, -1, 1), 1.0, kSeed, 0.0};
  const double frac = spectrum_simplicity(bern, 1000, 1e-8, ex).frac_degenerate;
  std::ostringstream os;
  os << "continuous: frac_degenerate " << worst << " over 1000 replicates (N = 8, 16, 22, 64; smallest gap "
     << min_gap << "); bernoulli A=0 N=2: " << frac;
  return {worst == 0.0 && std::abs(frac - 0.5) <= 0.05, os.str()};
}

Outcome mobius() {
  int ok = 0, with_cluster = 0, matched = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const CrossingCase c = make_crossing_case(kSeed, i);
    const MobiusScan s = mobius_dichotomy(c.h, c.u, c.x, c.E, c.V_grid);
    const double step = c.V_grid[1] - c.V_grid[0];
    ok += s.clusters <= 1;
    if (s.clusters == 1) {
      ++with_cluster;
      matched += s.predicted && std::abs(*s.predicted - s.cluster_location[0]) <= step;
    }
  }
  std::ostringstream os;
  os << ok << "/50 scans with at most one diverging cluster; " << matched << "/" << with_cluster
     << " cluster locations matched by the cross-ratio prediction";
  return {ok == 50 && matched == with_cluster, os.str()};
}

Outcome delta() {
  struct Pair {
    const char* name;
    Distribution V;
    std::optional<Distribution> X;
    double delta;
  };
  const Pair pairs[] = {{"uniform/uniform", Distribution::uniform(0, 1), Distribution::uniform(0, 1), 0.5},
                        {"gaussian/0", Distribution::gaussian(0, 1), std::nullopt, 0.1},
                        {"cauchy/uniform", Distribution::cauchy(0, 1), Distribution::uniform(-0.5, 0.5), 0.5}};
  bool ok = true;
  std::ostringstream os;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto r = delta_principle(pairs[i].V, pairs[i].X, pairs[i].delta, EtaLadder{0.1, 8}, 400000, kSeed + i);
    ok = ok && r.holds;
    os << pairs[i].name << ": lhs " << fmt("%.4f", r.lhs_limit) << " +- " << fmt("%.4f", r.lhs_limit_err) << " <= rhs "
       << fmt("%.4f", r.rhs) << " (c " << fmt("%.3f", r.c) << ") " << (r.holds ? "holds" : "FAILS") << "; ";
  }
  return {ok, os.str()};
}

Outcome zero_one() {
  ClassifyOptions opt;
  opt.exec = exec_all();
  const auto grid = energy_grid(-3.5, 3.5, 41);
  std::vector<int> mids;
  std::ostringstream os;
  for (int D : {6, 8, 10}) {
    const OperatorModel m{make_tree(2, D), Distribution::uniform(-0.5, 0.5), 0.2, kSeed, 1.0};
    int mid = 0;
    for (const auto& c : classify_energies(m, grid, 100, opt)) mid += c.frac_diverging > 0.1 && c.frac_diverging < 0.9;
    mids.push_back(mid);
    os << "D=" << D << ": " << mid << " intermediate energies; ";
  }
  return {mids[1] <= mids[0] && mids[2] <= mids[1], os.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome reproducibility() {
  const char* configs[] = {
      R"({"command": "green", "topology": {"kind": "box", "dims": [6, 6]}, "green": {"replicates": 16}})",
      R"({"command": "dos", "topology": {"kind": "box", "dims": [6, 6]}, "dos": {"replicates": 400}})",
      R"({"command": "gamma-scan", "topology": {"kind": "tree", "K": 2, "D": 7}, "lambda": 0.5,
          "gamma_scan": {"replicates": 12}})",
      R"({"command": "resonance", "topology": {"kind": "tree", "K": 2, "D": 8}, "lambda": 0.2,
          "resonance": {"R": 6, "replicates": 200, "calibration_replicates": 50, "ct_replicates": 10}})",
      R"({"command": "lyapunov", "topology": {"kind": "tree", "K": 2, "D": 10}, "lambda": 1,
          "lyapunov": {"energies": [0, 1], "replicates": 10, "d_min": 4, "d_max": 8}})",
      R"({"command": "phase-scan", "topology": {"kind": "tree", "K": 2, "D": 9},
          "phase_scan": {"energies": [0, 1], "lambdas": [0.5, 20], "replicates": 6, "d_min": 3, "d_max": 7}})",
      R"({"command": "verify-all", "topology": {"kind": "tree", "K": 2, "D": 6}, "lambda": 0.5,
          "verify_all": {"identity_instances": 4, "rank_one_instances": 4, "mobius_scans": 2, "two_site_draws": 4,
                         "delta_replicates": 20000, "simplicity_replicates": 40, "null_average_replicates": 200}})"};
  const fs::path root = fs::temp_directory_path() / "resdeloc_acceptance_repro";
  int same = 0, total = 0;
  std::string first_diff;
  for (const char* text : configs) {
    RunConfig c = parse_config(text);
    const std::string name = to_string(c.command);
    std::string outputs[2];
    int codes[2] = {0, 0};
    const int workers[2] = {1, 8};
    for (int k = 0; k < 2; ++k) {
      c.workers = workers[k];
      const fs::path dir = root / (name + "_" + std::to_string(workers[k]));
      fs::remove_all(dir);
      codes[k] = run(c, {dir, {}}).exit_code;
      outputs[k] = slurp(dir / (name + ".csv")) + slurp(dir / (name + ".summary.json"));
    }
    ++total;
    if (outputs[0] == outputs[1] && codes[0] == 0 && codes[1] == 0 && !outputs[0].empty())
      ++same;
    else if (first_diff.empty())
      first_diff = name;
  }
  fs::remove_all(root);
  std::ostringstream os;
  os << same << "/" << total << " commands byte-identical for workers 1 and 8 (csv and summary)";
  if (!first_diff.empty()) os << "; first mismatch: " << first_diff;
  return {same == total, os.str()};
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;  // 0 = no limit
  std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "exact identities", 30, identities},
      {2, "rank-one eigenvalue placement", 10, rank_one},
      {3, "zero-disorder Lyapunov constants", 60, lyapunov_constants},
      {4, "Wegner bound", 300, wegner},
      {5, "g lower bound on triple events", 0, g_bound},
      {6, "two-site area bound", 120, two_site},
      {7, "Paley-Zygmund and second moment", 600, second_moment},
      {8, "first-moment bound", 0, first_moment},
      {9, "simplicity of spectrum", 0, simplicity},
      {10, "Moebius dichotomy", 0, mobius},
      {11, "delta-function principle", 0, delta},
      {12, "zero-one proxy", 900, zero_one},
      {13, "reproducibility across worker counts", 0, reproducibility},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!pick.empty() && !pick.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // the shared resonance run is charged to criterion 7
    if (c.id == 7) secs = std::max(secs, resonance_run().seconds);
    while (o.detail.ends_with("; ") || o.detail.ends_with(" ")) o.detail.pop_back();
    if (c.budget_s > 0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += "; over the time budget of " + fmt("%.0f", c.budget_s) + " s";
    }
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
