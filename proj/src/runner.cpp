#include "resdeloc/runner.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "resdeloc/asymptotics.hpp"
#include "resdeloc/diagnostics.hpp"
#include "resdeloc/errors.hpp"
#include "resdeloc/resonance.hpp"
#include "resdeloc/theorems.hpp"

namespace resdeloc {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), r.ptr);
}

AtomicFile::AtomicFile(fs::path target) : target_(std::move(target)) {
  temp_ = target_;
  temp_ += ".tmp." + std::to_string(::getpid());
  out_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open " + temp_.string());
}

AtomicFile::~AtomicFile() {
  if (committed_) return;
  out_.close();
  std::error_code ec;
  fs::remove(temp_, ec);
}

void AtomicFile::write(std::string_view text) {
  out_.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out_) throw IoError("write failed: " + temp_.string());
}

void AtomicFile::commit() {
  out_.flush();
  out_.close();
  if (out_.fail()) throw IoError("close failed: " + temp_.string());
  std::error_code ec;
  fs::rename(temp_, target_, ec);
  if (ec) throw IoError("rename to " + target_.string() + " failed: " + ec.message());
  committed_ = true;
}

CsvWriter::CsvWriter(AtomicFile& file, std::vector<std::string> columns) : file_(file), columns_(columns.size()) {
  std::string header;
  for (std::size_t i = 0; i < columns.size(); ++i) header += (i ? "," : "") + columns[i];
  file_.write(header + "\n");
}

CsvWriter& CsvWriter::cell(double v) {
  line_ += (filled_++ ? "," : "") + format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
  line_ += (filled_++ ? "," : "") + std::to_string(v);
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  line_ += filled_++ ? "," : "";
  if (v.find_first_of(",\"\n") == std::string::npos) {
    line_ += v;
  } else {
    line_ += '"';
    for (char ch : v) line_ += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    line_ += '"';
  }
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("csv row has the wrong number of cells");
  file_.write(line_ + "\n");
  line_.clear();
  filled_ = 0;
}

json reference_values(const RunConfig& c) {
  json r;
  if (c.topology.kind == GraphKind::tree) {
    const double K = c.topology.K;
    r["K"] = c.topology.K;
    r["log_sqrt_K"] = 0.5 * std::log(K);
    r["log_K"] = std::log(K);
    r["spectrum_edges"] = {-2.0 * std::sqrt(K), 2.0 * std::sqrt(K)};
    r["adjacency_norm_bound"] = K + 1.0;
  } else {
    r["K"] = nullptr;
    r["log_sqrt_K"] = nullptr;
    r["log_K"] = nullptr;
    r["spectrum_edges"] = nullptr;
  }
  const double lambda = c.command == Command::phase_scan ? 0.0 : c.lambda;
  if (c.dist.has_density() && lambda > 0)
    r["wegner_line"] = c.dist.scaled(lambda).density_sup();
  else
    r["wegner_line"] = nullptr;
  return r;
}

namespace {

struct Context {
  const RunConfig& config;
  const RunOptions& options;
  Exec exec;
  std::vector<std::string>& warnings;
};

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json mean_json(const MeanEstimate& m) { return {{"mean", m.mean}, {"stderr", m.stderr_}, {"n", m.n}}; }

json run_green(Context& ctx, const OperatorModel& model, AtomicFile& file) {
  const auto& p = ctx.config.green;
  const VertexId x = p.x.value_or(model.graph.origin());
  const auto dist = model.graph.distances_from(x);
  CsvWriter csv(file, {"replicate", "y", "distance", "re_G", "im_G", "abs_G"});
  const auto reps = static_cast<std::size_t>(p.replicates);
  const auto cols = map_indexed<GreenColumn>(reps, ctx.exec, [&](std::size_t r) {
    const auto s = sample_potential(model, r);
    return green_column(hamiltonian(model, s), x, ComplexEnergy(p.E, p.eta));
  });
  json per = json::array();
  for (std::size_t r = 0; r < reps; ++r) {
    const auto& g = cols[r].values;
    for (Eigen::Index y = 0; y < g.size(); ++y)
      csv.cell(r).cell(static_cast<std::size_t>(y)).cell(dist[static_cast<std::size_t>(y)])
          .cell(g(y).real()).cell(g(y).imag()).cell(std::abs(g(y))).end_row();
    const cplx gxx = g(static_cast<Eigen::Index>(x));
    per.push_back({{"replicate", r},
                   {"G_xx", {gxx.real(), gxx.imag()}},
                   {"sum_abs_G_sq", g.squaredNorm()},
                   {"im_G_over_eta", gxx.imag() / p.eta},
                   {"residual", cols[r].residual_norm}});
  }
  return {{"x", x}, {"E", p.E}, {"eta", p.eta}, {"replicates", per}};
}

json run_dos(Context& ctx, const OperatorModel& model, AtomicFile& file) {
  const auto& p = ctx.config.dos;
  DosOptions opt{p.estimator, ctx.config.boundary, ctx.exec};
  const auto est = dos_scan(model, p.energies, p.eta, p.replicates, opt);
  CsvWriter csv(file, {"E", "eta", "n_hat", "stderr", "wegner_bound", "wegner_ok"});
  int violations = 0;
  for (const auto& e : est) {
    csv.cell(e.E).cell(e.eta).cell(e.n_hat).cell(e.stderr_).cell(e.wegner_bound).cell(e.wegner_ok ? 1 : 0).end_row();
    if (!e.wegner_ok) {
      ++violations;
      ctx.warnings.push_back("dos: Wegner bound exceeded beyond 3 stderr at E=" + format_double(e.E));
    }
  }
  return {{"eta", p.eta},
          {"replicates", p.replicates},
          {"estimator", p.estimator == DosEstimator::plain ? "plain" : "spectral_average"},
          {"wegner_violations", violations}};
}

json run_gamma_scan(Context& ctx, const OperatorModel& model, AtomicFile& file) {
  const auto& c = ctx.config;
  const auto& p = c.gamma_scan;
  const bool tree = model.graph.kind() == GraphKind::tree;
  const std::size_t ne = p.energies.size(), nr = static_cast<std::size_t>(p.replicates);

  std::vector<std::vector<BoundaryPool>> pools(ne);
  if (tree && needs_pool(c.boundary)) {
    for_each_index(ne, ctx.exec, [&](std::size_t ie) {
      for (double eta : c.ladder.values())
        pools[ie].push_back(*make_pool(model, ComplexEnergy(p.energies[ie], eta), c.boundary));
    });
  }
  const auto traces = map_indexed<GammaTrace>(ne * nr, ctx.exec, [&](std::size_t k) {
    const std::size_t ie = k / nr, r = k % nr;
    const auto s = sample_potential(model, r);
    if (tree)
      return gamma_tree(model, s, p.energies[ie], c.ladder, c.boundary, pools[ie].empty() ? nullptr : &pools[ie]);
    return gamma(hamiltonian(model, s), model.graph.origin(), p.energies[ie], c.ladder);
  });

  CsvWriter csv(file, {"E", "eta", "gamma", "kappa", "imG", "verdict", "replicate"});
  json per_energy = json::array();
  for (std::size_t ie = 0; ie < ne; ++ie) {
    int counts[3] = {0, 0, 0};
    for (std::size_t r = 0; r < nr; ++r) {
      const auto& t = traces[ie * nr + r];
      const auto v = divergence_verdict(t, c.thresholds);
      ++counts[static_cast<int>(v.verdict)];
      for (const auto& pt : t.points)
        csv.cell(p.energies[ie]).cell(pt.eta).cell(pt.gamma_sum).cell(pt.kappa).cell(pt.G.imag())
            .cell(to_string(v.verdict)).cell(r).end_row();
    }
    const double n = static_cast<double>(nr);
    per_energy.push_back({{"E", p.energies[ie]},
                          {"frac_diverging", counts[0] / n},
                          {"frac_finite", counts[1] / n},
                          {"frac_inconclusive", counts[2] / n}});
  }
  return {{"replicates", p.replicates}, {"boundary", tree ? to_string(c.boundary) : "none"}, {"energies", per_energy}};
}

json run_resonance(Context& ctx, const OperatorModel& model, AtomicFile& file) {
  const auto& p = ctx.config.resonance;
  ResonanceOptions opt;
  opt.boundary = p.boundary;
  opt.eta = p.eta;
  opt.ct_replicates = p.ct_replicates;
  opt.exec = ctx.exec;
  opt.g_filter = ctx.options.g_filter;
  const auto cutoff = calibrate_cutoff(model, p.E, p.delta, p.R, p.calibration_replicates, opt);
  const auto rep = resonance_report(model, p.E, p.R, p.replicates, cutoff, opt);
  const auto forced = forced_resonance_check(model, p.E, cutoff, {p.R}, std::min(p.replicates, 200), opt);

  CsvWriter csv(file, {"replicate", "R", "N_R"});
  for (std::size_t r = 0; r < rep.counts.size(); ++r) csv.cell(r).cell(p.R).cell(rep.counts[r]).end_row();

  if (!rep.first_moment_ok) ctx.warnings.push_back("resonance: first-moment bound missed beyond 3 stderr");
  if (!rep.second_moment_ok) ctx.warnings.push_back("resonance: second-moment bound missed beyond 3 stderr");
  if (!rep.pz_ok) ctx.warnings.push_back("resonance: Paley-Zygmund bound missed beyond 3 stderr");
  if (rep.degenerate) ctx.warnings.push_back("resonance: no resonances observed; moment ratios undefined");

  json pz = json::array();
  for (const auto& q : rep.pz)
    pz.push_back({{"theta", q.theta}, {"prob", q.prob}, {"bound", q.bound}, {"stderr", q.stderr_}, {"holds", q.holds}});
  return {{"E", p.E},
          {"R", p.R},
          {"delta", p.delta},
          {"cutoff", cutoff.t},
          {"mean_N", mean_json(rep.mean_N)},
          {"sphere_cutoff_sum", rep.sphere_cutoff_sum},
          {"n_E", mean_json(rep.n_E)},
          {"first_moment", {{"observed", rep.mean_N.mean}, {"bound", rep.first_moment_bound}, {"holds", rep.first_moment_ok}}},
          {"second_moment",
           {{"ratio", rep.second_moment_ratio},
            {"stderr", rep.second_moment_stderr},
            {"rho_sup", rep.rho_sup},
            {"C_T", rep.C_T},
            {"bound", rep.second_moment_bound},
            {"holds", rep.second_moment_ok}}},
          {"paley_zygmund", pz},
          {"mean_abs_im_sigma_origin", rep.mean_abs_im_sigma_origin},
          {"triple_events", rep.triple_events},
          {"min_g_abs", rep.triple_events ? json(rep.min_g_abs) : json(nullptr)},
          {"degenerate", rep.degenerate},
          {"forced",
           {{"attempts", forced.attempts},
            {"triple_events", forced.triple_events},
            {"min_g_abs", forced.triple_events ? json(forced.min_g_abs) : json(nullptr)}}}};
}

DecayOptions decay_options(const Context& ctx, int d_min, int d_max, double eta) {
  DecayOptions opt;
  opt.d_min = d_min;
  opt.d_max = d_max;
  opt.eta = eta;
  opt.boundary = ctx.config.boundary;
  opt.exec = ctx.exec;
  return opt;
}

json run_lyapunov(Context& ctx, const OperatorModel& model, AtomicFile& file) {
  const auto& p = ctx.config.lyapunov;
  const auto opt = decay_options(ctx, p.d_min, p.d_max, p.eta);
  CsvWriter csv(file, {"E", "lambda", "L0", "L0_err", "L1", "L1_err", "r2_L0", "r2_L1", "flagged"});
  for (double E : p.energies) {
    const auto l = lyapunov(model, E, p.replicates, opt);
    csv.cell(E).cell(model.lambda).cell(l.L0).cell(l.L0_err).cell(l.L1).cell(l.L1_err).cell(l.r2_L0).cell(l.r2_L1)
        .cell(l.flagged ? 1 : 0).end_row();
    if (l.flagged) ctx.warnings.push_back("lyapunov: fit quality below r2_min at E=" + format_double(E));
  }
  return {{"replicates", p.replicates}, {"d_min", p.d_min}, {"d_max", p.d_max}, {"eta", p.eta}};
}

json run_phase_scan(Context& ctx, const OperatorModel& model, AtomicFile& file) {
  const auto& p = ctx.config.phase_scan;
  const auto opt = decay_options(ctx, p.d_min, p.d_max, p.eta);
  const auto rows = phase_scan(model, p.energies, p.lambdas, p.s, p.replicates, opt);
  CsvWriter csv(file, {"E", "lambda", "L0", "L0_err", "L1", "L1_err", "verdict", "s", "sum_trace_tail", "error"});
  int counts[3] = {0, 0, 0};
  for (const auto& r : rows) {
    ++counts[static_cast<int>(r.verdict)];
    const double tail = r.sum_trace.empty() ? std::numeric_limits<double>::quiet_NaN() : r.sum_trace.back();
    csv.cell(r.E).cell(r.lambda).cell(r.lyap.L0).cell(r.lyap.L0_err).cell(r.lyap.L1).cell(r.lyap.L1_err)
        .cell(to_string(r.verdict)).cell(r.s).cell(tail).cell(r.error).end_row();
    if (!r.error.empty()) ctx.warnings.push_back("phase-scan: cell failed: " + r.error);
  }
  return {{"s", p.s},
          {"replicates", p.replicates},
          {"d_min", p.d_min},
          {"d_max", p.d_max},
          {"cells", rows.size()},
          {"delocalized", counts[0]},
          {"localized", counts[1]},
          {"inconclusive", counts[2]}};
}

// verify-all: one record per check; integrity misses fail, statistics misses warn.
struct Check {
  std::string name;
  std::string status;
  double observed = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  std::string kind;
  std::string detail;
};

template <class F>
void guarded(std::vector<Check>& out, const std::string& name, F&& f) {
  try {
    f();
  } catch (const IntegrityError& e) {
    out.push_back({name, "fail", std::nan(""), std::nan(""), 0.0, "integrity", e.what()});
  } catch (const std::exception& e) {
    out.push_back({name, "fail", std::nan(""), std::nan(""), 0.0, "integrity", std::string("error: ") + e.what()});
  }
}

Check upper(const std::string& name, double observed, double bound, double tol, const std::string& kind) {
  const bool ok = observed <= bound + tol;
  return {name, ok ? "pass" : (kind == "statistics" ? "warn" : "fail"), observed, bound, tol, kind, ""};
}

std::vector<Check> verify_all_checks(Context& ctx, const OperatorModel& model) {
  const auto& c = ctx.config;
  const auto& v = c.verify_all;
  const std::uint64_t seed = c.seed;
  std::vector<Check> out;

  guarded(out, "exact_identities", [&] {
    const auto g = exact_identity_suite(seed, v.identity_instances, 5, ctx.exec);
    out.push_back(upper("identity_rank_one", g.rank_one, 0.0, 1e-10, "integrity"));
    out.push_back(upper("identity_two_site", g.two_site, 0.0, 1e-10, "integrity"));
    out.push_back(upper("identity_sigma_tau", g.sigma_tau, 0.0, 1e-10, "integrity"));
    out.push_back(upper("identity_g_ratio", g.g_ratio, 0.0, 1e-10, "integrity"));
    out.push_back(upper("identity_sum_rule", g.sum_rule, 0.0, 1e-10, "integrity"));
  });

  guarded(out, "rank_one_eigen", [&] {
    const auto reports = map_indexed<RankOneReport>(static_cast<std::size_t>(v.rank_one_instances), ctx.exec,
                                                    [&](std::size_t i) {
                                                      const auto rc = make_rank_one_case(seed, i);
                                                      return verify_rank_one_eigen(rc.h0, rc.psi, rc.E);
                                                    });
    double place = 0, sine = 0, mass = 0, moved = std::numeric_limits<double>::infinity();
    for (const auto& r : reports) {
      place = std::max(place, r.eigen_distance);
      sine = std::max(sine, r.collinearity_sine);
      mass = std::max(mass, r.mass_gap);
      moved = std::min(moved, r.perturbed_distance);
    }
    out.push_back(upper("rank_one_placement", place, 0.0, 1e-8, "integrity"));
    out.push_back(upper("rank_one_collinearity", sine, 0.0, 1e-6, "integrity"));
    out.push_back(upper("rank_one_mass", mass, 0.0, 1e-8, "integrity"));
    out.push_back({"rank_one_uniqueness", moved > 1e-6 ? "pass" : "fail", moved, 1e-6, 0.0, "integrity", "min distance"});
  });

  guarded(out, "mobius_dichotomy", [&] {
    const auto scans = map_indexed<MobiusScan>(static_cast<std::size_t>(v.mobius_scans), ctx.exec, [&](std::size_t i) {
      const auto cc = make_crossing_case(seed, i);
      return mobius_dichotomy(cc.h, cc.u, cc.x, cc.E, cc.V_grid, c.ladder, c.thresholds);
    });
    double max_clusters = 0, mismatches = 0, gap = 0;
    for (const auto& s : scans) {
      max_clusters = std::max(max_clusters, static_cast<double>(s.clusters));
      const double step = s.V_grid[1] - s.V_grid[0];
      if (s.clusters == 1 && (!s.predicted || std::abs(*s.predicted - s.cluster_location[0]) > step)) ++mismatches;
      gap = std::max(gap, s.cross_ratio_gap);
    }
    out.push_back(upper("mobius_at_most_one_cluster", max_clusters, 1.0, 0.0, "integrity"));
    out.push_back(upper("mobius_prediction_mismatches", mismatches, 0.0, 0.0, "integrity"));
    out.push_back(upper("mobius_cross_ratio_invariance", gap, 0.0, 1e-8, "integrity"));
  });

  guarded(out, "two_site_area_bound", [&] {
    const auto rho = Distribution::uniform(0.0, 1.0);
    const auto res = map_indexed<TwoSiteResult>(static_cast<std::size_t>(v.two_site_draws), ctx.exec,
                                                [&](std::size_t i) {
                                                  const auto d = random_two_site_draw(seed, i);
                                                  return two_site_area_bound(rho, rho, d.sigma_x, d.sigma_y, d.gamma,
                                                                             d.a, d.b);
                                                });
    double worst = -std::numeric_limits<double>::infinity();
    double wv = 0, iv = 0;
    for (const auto& r : res) {
      worst = std::max(worst, (r.lhs - r.quad_error) / r.rhs);
      wv += static_cast<double>(r.w_bound_violations);
      iv += static_cast<double>(r.interval_violations);
    }
    out.push_back(upper("two_site_lhs_over_rhs", worst, 1.0, 0.0, "integrity"));
    out.push_back(upper("two_site_w_bound_violations", wv, 0.0, 0.0, "integrity"));
    out.push_back(upper("two_site_interval_violations", iv, 0.0, 0.0, "integrity"));
  });

  guarded(out, "delta_principle", [&] {
    const EtaLadder ladder{0.1, 8};
    struct Pair {
      std::string name;
      Distribution V;
      std::optional<Distribution> X;
      double delta;
    };
    const std::vector<Pair> pairs = {
        {"delta_uniform_uniform", Distribution::uniform(0, 1), Distribution::uniform(0, 1), 0.5},
        {"delta_gaussian_zero", Distribution::gaussian(0, 1), std::nullopt, 0.1},
        {"delta_cauchy_uniform", Distribution::cauchy(0, 1), Distribution::uniform(-0.5, 0.5), 0.5}};
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto r = delta_principle(pairs[i].V, pairs[i].X, pairs[i].delta, ladder, v.delta_replicates, seed + i);
      out.push_back(upper(pairs[i].name, r.lhs_limit, r.rhs, 3.0 * std::hypot(r.lhs_limit_err, r.rhs_err),
                          "statistics"));
    }
  });

  guarded(out, "spectrum_simplicity", [&] {
    std::vector<std::pair<VertexId, VertexId>> path;
    for (VertexId i = 0; i + 1 < 8; ++i) path.emplace_back(i, i + 1);
    const OperatorModel chain{make_custom(8, path), Distribution::uniform(0, 1), 1.0, seed, 1.0};
    const auto s = spectrum_simplicity(chain, v.simplicity_replicates, 1e-8, ctx.exec);
    out.push_back(upper("simplicity_continuous", s.frac_degenerate, 0.0, 0.0, "integrity"));
    const OperatorModel pair{make_complete(2), Distribution::bernoulli(0.5, -1, 1), 1.0, seed, 0.0};
    const auto b = spectrum_simplicity(pair, v.simplicity_replicates, 1e-8, ctx.exec);
    const double tol = std::max(0.05, 3.0 * std::sqrt(0.25 / v.simplicity_replicates));
    out.push_back(upper("simplicity_bernoulli_counterexample", std::abs(b.frac_degenerate - 0.5), 0.0, tol,
                        "statistics"));
  });

  guarded(out, "spectral_null_average", [&] {
    const auto rc = make_rank_one_case(seed, 1000);
    const double E2 = rc.E + 0.25;
    const auto uni = spectral_null_average(rc.h0, rc.psi, {rc.E, E2}, [](Rng& r) { return -5.0 + 10.0 * uniform01(r); },
                                           v.null_average_replicates, seed, true);
    out.push_back(upper("null_average_continuous", uni.frac_hitting, 0.0, 0.0, "integrity"));
    const double vstar = uni.exceptional_v[0];
    const auto atom = spectral_null_average(rc.h0, rc.psi, {rc.E}, [vstar](Rng&) { return vstar; }, 100, seed, false);
    const bool ok = atom.frac_hitting == 1.0 && atom.hypothesis_violated;
    out.push_back({"null_average_point_mass", ok ? "pass" : "fail", atom.frac_hitting, 1.0, 0.0, "integrity",
                   "hypothesis flagged"});
  });

  if (model.graph.kind() == GraphKind::tree || model.graph.kind() == GraphKind::box) {
    guarded(out, "resonance_g_bound", [&] {
      if (!model.dist.has_density() || !(model.lambda > 0))
        throw std::invalid_argument("resonance check needs lambda > 0 and a density");
      ResonanceOptions opt;
      opt.exec = ctx.exec;
      opt.g_filter = ctx.options.g_filter;
      const int R = model.graph.kind() == GraphKind::tree ? std::min(4, model.graph.depth()) : 2;
      const auto cutoff = calibrate_cutoff(model, 0.0, 0.1, R, 20, opt);
      std::vector<int> radii;
      for (int r = 1; r <= R; ++r) radii.push_back(r);
      const auto f = forced_resonance_check(model, 0.0, cutoff, radii, 20, opt);
      Check ch{"resonance_g_bound", "pass", f.triple_events ? f.min_g_abs : std::nan(""), 0.49, 0.0, "integrity",
               std::to_string(f.triple_events) + " triple events"};
      if (f.triple_events && f.min_g_abs < 0.49) ch.status = "fail";
      out.push_back(ch);
    });
  }
  return out;
}

json run_verify_all(Context& ctx, const OperatorModel& model, AtomicFile& file, bool& failed) {
  const auto checks = verify_all_checks(ctx, model);
  CsvWriter csv(file, {"name", "status", "observed", "bound", "tolerance"});
  json records = json::array();
  int pass = 0, warn = 0, fail = 0;
  for (const auto& ch : checks) {
    csv.cell(ch.name).cell(ch.status).cell(ch.observed).cell(ch.bound).cell(ch.tolerance).end_row();
    json rec = {{"name", ch.name}, {"status", ch.status}, {"observed", ch.observed},
                {"bound", ch.bound}, {"tolerance", ch.tolerance}, {"class", ch.kind}};
    if (!ch.detail.empty()) rec["detail"] = ch.detail;
    records.push_back(rec);
    if (ch.status == "pass") ++pass;
    else if (ch.status == "warn") {
      ++warn;
      ctx.warnings.push_back("verify-all: " + ch.name + " outside 3 stderr");
    } else {
      ++fail;
    }
  }
  failed = fail > 0;
  return {{"records", records}, {"passed", pass}, {"warned", warn}, {"failed", fail}};
}

void write_json(const fs::path& path, const json& j) {
  AtomicFile f(path);
  f.write(j.dump(2) + "\n");
  f.commit();
}

}  // namespace

RunResult run(const RunConfig& config, const RunOptions& options) {
  RunResult result;
  const std::string started = utc_now();
  const std::string name = to_string(config.command);
  const fs::path csv_path = options.out_dir / (name + ".csv");
  const fs::path summary_path = options.out_dir / (name + ".summary.json");
  std::vector<std::string> written;

  try {
    RunConfig checked = config;
    validate(checked);
    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + options.out_dir.string() + ": " + ec.message());

    Context ctx{config, options, Exec::with_workers(config.workers), result.warnings};
    json summary = {{"command", name}, {"seed", config.seed}, {"version", kVersion}};
    summary["config_digest"] = sha256_hex(config.canonical.dump());
    summary["reference"] = reference_values(config);
    try {
      const OperatorModel model = build_model(config);
      AtomicFile csv(csv_path);
      json body;
      bool failed = false;
      switch (config.command) {
        case Command::green: body = run_green(ctx, model, csv); break;
        case Command::dos: body = run_dos(ctx, model, csv); break;
        case Command::gamma_scan: body = run_gamma_scan(ctx, model, csv); break;
        case Command::resonance: body = run_resonance(ctx, model, csv); break;
        case Command::lyapunov: body = run_lyapunov(ctx, model, csv); break;
        case Command::phase_scan: body = run_phase_scan(ctx, model, csv); break;
        case Command::verify_all: body = run_verify_all(ctx, model, csv, failed); break;
      }
      csv.commit();
      written.push_back(csv_path.filename().string());
      summary["status"] = failed ? "integrity_failure" : "ok";
      summary["result"] = body;
      summary["warnings"] = result.warnings;
      if (failed) {
        result.exit_code = 2;
        result.message = "integrity checks failed";
      }
    } catch (const IntegrityError& e) {
      fs::remove(csv_path, ec);
      summary["status"] = "integrity_failure";
      summary["error"] = e.what();
      summary["warnings"] = result.warnings;
      result.exit_code = 2;
      result.message = e.what();
    }
    write_json(summary_path, summary);
    written.push_back(summary_path.filename().string());

    json files = json::array();
    for (const auto& f : written)
      files.push_back({{"name", f},
                       {"sha256", sha256_file(options.out_dir / f)},
                       {"bytes", fs::file_size(options.out_dir / f)}});
    result.manifest = {{"artifact_version", kVersion},
                       {"command", name},
                       {"config_digest", summary["config_digest"]},
                       {"seed", config.seed},
                       {"workers", config.workers},
                       {"started_at", started},
                       {"finished_at", utc_now()},
                       {"exit_code", result.exit_code},
                       {"files", files}};
    write_json(options.out_dir / "manifest.json", result.manifest);
  } catch (const ConfigError& e) {
    result.exit_code = 1;
    result.message = e.what();
  } catch (const std::invalid_argument& e) {
    result.exit_code = 1;
    result.message = e.what();
  } catch (const IoError& e) {
    result.exit_code = 3;
    result.message = e.what();
  } catch (const fs::filesystem_error& e) {
    result.exit_code = 3;
    result.message = e.what();
  } catch (const std::exception& e) {
    result.exit_code = 2;
    result.message = std::string("computation failed: ") + e.what();
  }
  return result;
}

}  // namespace resdeloc
