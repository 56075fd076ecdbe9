#include "resdeloc/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "resdeloc/diagnostics.hpp"

namespace resdeloc {

namespace {

void check_window(const OperatorModel& model, const DecayOptions& opt) {
  const Graph& g = model.graph;
  if (g.kind() != GraphKind::tree) throw std::invalid_argument("decay-rate estimates need a tree topology");
  if (opt.d_min < 1 || opt.d_max - opt.d_min + 1 < 4)
    throw std::invalid_argument("distance window must hold at least 4 distances");
  if (opt.d_max > g.depth() - 2) throw std::invalid_argument("d_max must be <= D - 2 (outer shells excluded)");
}

std::vector<double> column_mean(const std::vector<std::vector<double>>& rows) {
  std::vector<double> out(rows.front().size(), 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < r.size(); ++j) out[j] += r[j];
  for (double& v : out) v /= static_cast<double>(rows.size());
  return out;
}

// Fit of log(mean over replicates) against x, with a jackknife error when possible.
struct LogMeanFit {
  double slope = 0.0;
  double err = 0.0;
  double r2 = 0.0;
};

LogMeanFit fit_log_mean(const std::vector<std::vector<double>>& rows, const std::vector<double>& x) {
  auto logs = [](const std::vector<double>& m) {
    std::vector<double> out(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) out[j] = std::log(std::max(m[j], 1e-300));
    return out;
  };
  const LinearFit f = linear_fit(x, logs(column_mean(rows)));
  LogMeanFit out{f.slope, f.slope_stderr, f.r2};
  if (rows.size() >= 2)
    out.err = jackknife_stderr(rows, [&](const std::vector<double>& m) { return linear_fit(x, logs(m)).slope; });
  return out;
}

}  // namespace

TauStatistics collect_tau_statistics(const OperatorModel& model, double E, int replicates,
                                     const std::vector<double>& s_values, const DecayOptions& opt) {
  check_window(model, opt);
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  for (double s : s_values)
    if (!(s > 0 && s <= 1)) throw std::invalid_argument("s must lie in (0, 1]");
  const Graph& g = model.graph;
  TauStatistics st;
  st.s_values = s_values;
  std::vector<std::vector<VertexId>> sites;
  for (int d = opt.d_min; d <= opt.d_max; ++d) {
    st.distances.push_back(d);
    st.sphere_size.push_back(static_cast<double>(tree_sphere_size(g.branching(), d)));
    const auto [b, e] = g.shell_range(d);
    const std::size_t n = e - b, m = std::min(n, opt.max_per_sphere);
    std::vector<VertexId> pick(m);
    for (std::size_t j = 0; j < m; ++j) pick[j] = b + j * n / m;
    sites.push_back(std::move(pick));
  }
  const auto pool = make_pool(model, ComplexEnergy(E, opt.eta), opt.boundary);

  const auto reps = static_cast<std::size_t>(replicates);
  const std::size_t nd = st.distances.size(), ns = s_values.size();
  st.mean_log.assign(reps, std::vector<double>(nd));
  st.mean_trunc.assign(reps, std::vector<double>(nd));
  st.mean_trunc_pow.assign(ns, std::vector<std::vector<double>>(reps, std::vector<double>(nd)));
  st.mean_pow = st.mean_trunc_pow;
  st.dos.assign(reps, 0.0);

  for_each_index(reps, opt.exec, [&](std::size_t r) {
    const PotentialSample sample = sample_potential(model, r, opt.key);
    const TreeGreen tg(model, sample, ComplexEnergy(E, opt.eta), opt.boundary, pool ? &*pool : nullptr);
    const cplx sigma0 = tg.self_energy(0);
    st.dos[r] = model.lambda > 0 ? averaged_spectral_density(model.dist.scaled(model.lambda), sigma0)
                                 : tg.G00().imag() / std::numbers::pi;
    for (std::size_t j = 0; j < nd; ++j) {
      double sum_log = 0, sum_trunc = 0;
      std::vector<double> sum_tp(ns, 0.0), sum_p(ns, 0.0);
      for (VertexId x : sites[j]) {
        const double a = std::abs(tg.tau_root(x));
        sum_log += std::log(a);
        const double tr = std::min(a, 1.0);
        sum_trunc += tr;
        for (std::size_t k = 0; k < ns; ++k) {
          sum_tp[k] += std::pow(tr, s_values[k]);
          sum_p[k] += std::pow(a, s_values[k]);
        }
      }
      const double m = static_cast<double>(sites[j].size());
      st.mean_log[r][j] = sum_log / m;
      st.mean_trunc[r][j] = sum_trunc / m;
      for (std::size_t k = 0; k < ns; ++k) {
        st.mean_trunc_pow[k][r][j] = sum_tp[k] / m;
        st.mean_pow[k][r][j] = sum_p[k] / m;
      }
    }
  });
  return st;
}

LyapunovEstimate lyapunov_from(const TauStatistics& st, double E, double lambda, const DecayOptions& opt) {
  LyapunovEstimate est;
  est.E = E;
  est.lambda = lambda;
  est.d_min = opt.d_min;
  est.d_max = opt.d_max;
  const std::vector<double> d(st.distances.begin(), st.distances.end());

  std::vector<double> slopes;
  for (const auto& row : st.mean_log) slopes.push_back(linear_fit(d, row).slope);
  const MeanEstimate ms = mean_stderr(slopes);
  const LinearFit avg = linear_fit(d, column_mean(st.mean_log));
  est.L0 = -ms.mean;
  est.L0_err = slopes.size() >= 2 ? ms.stderr_ : avg.slope_stderr;
  est.r2_L0 = avg.r2;

  const LogMeanFit l1 = fit_log_mean(st.mean_trunc, d);
  est.L1 = -l1.slope;
  est.L1_err = l1.err;
  est.r2_L1 = l1.r2;
  est.flagged = est.r2_L0 < opt.r2_min || est.r2_L1 < opt.r2_min;
  return est;
}

LyapunovEstimate lyapunov(const OperatorModel& model, double E, int replicates, const DecayOptions& opt) {
  return lyapunov_from(collect_tau_statistics(model, E, replicates, {}, opt), E, model.lambda, opt);
}

LyapunovEstimate lyapunov_L0(const OperatorModel& model, double E, int replicates, const DecayOptions& opt) {
  LyapunovEstimate est = lyapunov(model, E, replicates, opt);
  est.L1 = est.L1_err = est.r2_L1 = 0.0;
  est.flagged = est.r2_L0 < opt.r2_min;
  return est;
}

LyapunovEstimate exponent_L1(const OperatorModel& model, double E, int replicates, const DecayOptions& opt) {
  LyapunovEstimate est = lyapunov(model, E, replicates, opt);
  est.L0 = est.L0_err = est.r2_L0 = 0.0;
  est.flagged = est.r2_L1 < opt.r2_min;
  return est;
}

FreeEnergyCurve phi_s(const OperatorModel& model, double E, const std::vector<double>& s_grid, int replicates,
                      const DecayOptions& opt) {
  if (s_grid.empty()) throw std::invalid_argument("phi_s: empty s grid");
  const TauStatistics st = collect_tau_statistics(model, E, replicates, s_grid, opt);
  FreeEnergyCurve c;
  c.E = E;
  c.lambda = model.lambda;
  c.s = s_grid;
  std::vector<double> chi;
  for (double n : st.sphere_size) chi.push_back(std::log(n));
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    const LogMeanFit f = fit_log_mean(st.mean_trunc_pow[k], chi);
    c.phi.push_back(f.slope);
    c.phi_err.push_back(f.err);
    c.r2.push_back(f.r2);
  }
  return c;
}

std::string to_string(Phase p) {
  switch (p) {
    case Phase::delocalized: return "delocalization-test-passed";
    case Phase::localized: return "localization-test-passed";
    case Phase::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

PhaseVerdict phase_verdict(const OperatorModel& model, double E, double s, int replicates, const DecayOptions& opt) {
  if (!(s > 0 && s < 1)) throw std::invalid_argument("phase_verdict: s must lie in (0, 1)");
  const TauStatistics st = collect_tau_statistics(model, E, replicates, {s}, opt);
  PhaseVerdict v;
  v.E = E;
  v.lambda = model.lambda;
  v.s = s;
  v.lyap = lyapunov_from(st, E, model.lambda, opt);
  v.log_K = std::log(static_cast<double>(model.graph.branching()));
  v.n_E = mean_stderr(st.dos);

  // increments I_R = |S_R| E|tau|^s, rows scaled by the sphere sizes
  std::vector<std::vector<double>> rows = st.mean_pow[0];
  for (auto& row : rows)
    for (std::size_t j = 0; j < row.size(); ++j) row[j] *= st.sphere_size[j];
  const std::vector<double> d(st.distances.begin(), st.distances.end());
  const LogMeanFit inc = fit_log_mean(rows, d);
  v.increment_slope = inc.slope;
  v.increment_slope_err = inc.err;
  const std::vector<double> incs = column_mean(rows);
  double partial = 0.0;
  for (double I : incs) v.sum_trace.push_back(partial += I);

  constexpr double dos_floor = 1e-4;
  v.deloc_test = v.lyap.L0 + 3.0 * v.lyap.L0_err < v.log_K && v.n_E.mean > 3.0 * v.n_E.stderr_ &&
                 v.n_E.mean > dos_floor;
  v.loc_test = inc.slope + 3.0 * inc.err < 0.0;
  if (v.deloc_test != v.loc_test) v.verdict = v.deloc_test ? Phase::delocalized : Phase::localized;
  return v;
}

std::vector<PhaseVerdict> phase_scan(const OperatorModel& base, const std::vector<double>& energies,
                                     const std::vector<double>& lambdas, double s, int replicates,
                                     const DecayOptions& opt) {
  if (energies.empty() || lambdas.empty()) throw std::invalid_argument("phase_scan: empty grid");
  const std::size_t ne = energies.size(), nl = lambdas.size();
  std::vector<PhaseVerdict> out(ne * nl);
  // cells run in parallel; each cell is serial inside
  for_each_index(ne * nl, opt.exec, [&](std::size_t c) {
    const std::size_t il = c / ne, ie = c % ne;
    OperatorModel m = base;
    m.lambda = lambdas[il];
    DecayOptions cell = opt;
    cell.exec = Exec::serial();
    cell.key = {StreamTag::phase, {static_cast<std::uint64_t>(ie), static_cast<std::uint64_t>(il)}};
    try {
      out[c] = phase_verdict(m, energies[ie], s, replicates, cell);
    } catch (const std::exception& e) {
      PhaseVerdict v;
      v.E = energies[ie];
      v.lambda = lambdas[il];
      v.s = s;
      v.error = e.what();
      out[c] = v;
    }
  });
  return out;
}

}  // namespace resdeloc
