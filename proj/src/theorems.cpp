#include "resdeloc/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "resdeloc/errors.hpp"
#include "resdeloc/stats.hpp"

namespace resdeloc {

SpectralDecomposition spectral_decomposition(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw IntegrityError("eigensolver failed");
  SpectralDecomposition s;
  s.eigenvalues = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();
  const double hn = std::max(h.norm(), 1e-300);
  s.residual = (h * s.eigenvectors - s.eigenvectors * s.eigenvalues.asDiagonal()).colwise().norm().maxCoeff() / hn;
  const Eigen::Index n = h.rows();
  s.orthonormality =
      (s.eigenvectors.transpose() * s.eigenvectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  s.min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 1; k < n; ++k) s.min_gap = std::min(s.min_gap, s.eigenvalues(k) - s.eigenvalues(k - 1));
  if (s.residual > 1e-9 || s.orthonormality > 1e-10) {
    std::ostringstream os;
    os << "eigendecomposition rejected: residual " << s.residual << ", orthonormality " << s.orthonormality;
    throw IntegrityError(os.str());
  }
  return s;
}

namespace {

double distance_to_spectrum(const Eigen::VectorXd& eig, double E) {
  return (eig.array() - E).abs().minCoeff();
}

}  // namespace

RankOneReport verify_rank_one_eigen(const Eigen::MatrixXd& h0, const Eigen::VectorXd& psi, double E) {
  const Eigen::Index n = h0.rows();
  if (h0.cols() != n || psi.size() != n) throw std::invalid_argument("dimension mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-12) throw std::invalid_argument("psi must be a unit vector");
  const auto base = spectral_decomposition(h0);
  if (distance_to_spectrum(base.eigenvalues, E) < 1e-10) throw std::invalid_argument("E is an eigenvalue of H0");

  const Eigen::MatrixXd shifted = h0 - E * Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd w = shifted.lu().solve(psi);
  const double q = psi.dot(w);
  if (std::abs(q) < 1e-14) throw std::invalid_argument("<psi,(H0-E)^-1 psi> vanishes");

  RankOneReport r;
  r.v = -1.0 / q;
  const Eigen::MatrixXd hv = h0 + r.v * psi * psi.transpose();
  const auto dec = spectral_decomposition(hv);
  Eigen::Index k = 0;
  r.eigen_distance = (dec.eigenvalues.array() - E).abs().minCoeff(&k);
  const Eigen::VectorXd phi = dec.eigenvectors.col(k);
  const double cosine = std::min(1.0, std::abs(phi.dot(w)) / w.norm());
  r.collinearity_sine = std::sqrt(std::max(0.0, 1.0 - cosine * cosine));
  r.mass_observed = std::pow(psi.dot(phi), 2);
  r.mass_formula = 1.0 / (r.v * r.v * w.squaredNorm());
  r.mass_gap = std::abs(r.mass_observed - r.mass_formula);

  const Eigen::MatrixXd hp = h0 + r.v * (1.0 + 1e-3) * psi * psi.transpose();
  r.perturbed_distance = distance_to_spectrum(spectral_decomposition(hp).eigenvalues, E);
  r.passed = r.eigen_distance <= 1e-8 && r.collinearity_sine <= 1e-6 && r.mass_gap <= 1e-8 &&
             r.perturbed_distance > 1e-6;
  return r;
}

cplx cross_ratio(cplx a, cplx b, cplx c, cplx d) { return ((a - b) * (c - d)) / ((a - c) * (b - d)); }

MobiusScan mobius_dichotomy(const Eigen::MatrixXd& h, VertexId u, VertexId x, double E,
                            const std::vector<double>& V_grid, const EtaLadder& ladder,
                            const DivergenceThresholds& th) {
  const auto n = static_cast<VertexId>(h.rows());
  if (u >= n || x >= n || u == x) throw std::invalid_argument("mobius scan needs distinct sites u, x");
  if (V_grid.size() < 100) throw std::invalid_argument("mobius scan needs at least 100 grid values");

  MobiusScan scan;
  scan.u = u;
  scan.x = x;
  scan.E = E;
  scan.V_grid = V_grid;
  const auto etas = ladder.values();
  std::vector<cplx> f_min(V_grid.size());
  Eigen::MatrixXd hv = h;
  for (std::size_t i = 0; i < V_grid.size(); ++i) {
    hv(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(u)) = V_grid[i];
    std::vector<double> imf;
    cplx f;
    for (double eta : etas) {
      const auto col = green_column(hv, x, ComplexEnergy(E, eta));
      f = -(1.0 / eta) / col.values(static_cast<Eigen::Index>(x));
      imf.push_back(f.imag());
    }
    const auto v = divergence_verdict(etas, imf, th);
    scan.exponent.push_back(v.p);
    scan.verdicts.push_back(v.verdict);
    scan.im_F_min.push_back(imf.back());
    f_min[i] = f;
  }

  for (std::size_t i = 0; i < V_grid.size();) {
    if (scan.verdicts[i] != Verdict::diverging) {
      ++i;
      continue;
    }
    std::size_t best = i;
    for (; i < V_grid.size() && scan.verdicts[i] == Verdict::diverging; ++i)
      if (scan.im_F_min[i] > scan.im_F_min[best]) best = i;
    scan.cluster_location.push_back(V_grid[best]);
    ++scan.clusters;
  }

  std::vector<std::size_t> finite;
  for (std::size_t i = 0; i < V_grid.size(); ++i)
    if (scan.verdicts[i] == Verdict::finite) finite.push_back(i);
  if (finite.size() < 4) throw std::runtime_error("mobius scan: fewer than three finite-limit points");
  const std::size_t i1 = finite.front(), i2 = finite[finite.size() / 3], i3 = finite[2 * finite.size() / 3],
                    i4 = finite.back();
  const cplx V1 = V_grid[i1], V2 = V_grid[i2], V3 = V_grid[i3], V4 = V_grid[i4];
  const cplx F1 = f_min[i1], F2 = f_min[i2], F3 = f_min[i3], F4 = f_min[i4];
  // F = infinity: the cross ratio of the images reduces to (F2 - F3) / (F1 - F3).
  const cplx r = (F2 - F3) / (F1 - F3);
  const cplx pole = (V1 * (V2 - V3) - r * V2 * (V1 - V3)) / ((V2 - V3) - r * (V1 - V3));
  if (std::isfinite(pole.real())) scan.predicted = pole.real();
  scan.cross_ratio_gap = rel_gap(cross_ratio(V4, V1, V2, V3), cross_ratio(F4, F1, F2, F3));
  return scan;
}

CrossingCase make_crossing_case(std::uint64_t seed, std::uint64_t index, int grid_points) {
  if (grid_points < 100) throw std::invalid_argument("crossing case needs >= 100 grid points");
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng = make_stream(seed, StreamTag::theorem, {0xc7055, index, attempt});
    const int n = 6 + static_cast<int>(uniform01(rng) * 7);
    Eigen::MatrixXd h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) h(i, j) = h(j, i) = 2.0 * uniform01(rng) - 1.0;
    CrossingCase c;
    c.x = 0;
    c.u = 1 + static_cast<VertexId>(uniform01(rng) * (n - 1));
    c.w_star = 2.0 * uniform01(rng) - 1.0;
    h(static_cast<Eigen::Index>(c.u), static_cast<Eigen::Index>(c.u)) = c.w_star;

    // Spectrum of H with site x removed; its eigenvalues are the poles of Sigma(x).
    const Eigen::MatrixXd hq = h.bottomRightCorner(n - 1, n - 1);
    const Eigen::VectorXd hx = h.col(0).tail(n - 1);
    const auto dec = spectral_decomposition(hq);
    const Eigen::Index ui = static_cast<Eigen::Index>(c.u) - 1;
    double best = 0.0;
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n - 1; ++j) {
      const double weight = std::pow(dec.eigenvectors(ui, j), 2) * std::pow(hx.dot(dec.eigenvectors.col(j)), 2);
      if (weight > best) {
        best = weight;
        k = j;
      }
    }
    if (best < 1e-2 || dec.min_gap < 1e-2) continue;
    c.E = dec.eigenvalues(k);
    c.h = h;
    const double step = 10.0 / (grid_points - 1);
    for (int i = 0; i < grid_points; ++i) c.V_grid.push_back(c.w_star - 5.0 + step * i);
    c.V_grid[grid_points / 2] = c.w_star;
    return c;
  }
}

namespace {

struct Interval {
  double lo, hi;
};

struct TwoSitePass {
  double lhs = 0.0;
  std::size_t w_violations = 0;
  std::size_t interval_violations = 0;
};

// Outer midpoint rule over t in (0,1) with v = Q_y(t); the inner variable u
// (at x) is integrated exactly over the solution intervals.
TwoSitePass two_site_pass(const Distribution& rho_x, const Distribution& rho_y, cplx sx, cplx sy, cplx g, double a,
                          double b, int n) {
  TwoSitePass out;
  const double r = std::sqrt(a * b);
  const double s = std::sqrt(b / a);
  const double Y = -s * sx.imag();
  const double wbound = std::sqrt(std::abs(g)) + r;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rho_y.quantile((i + 0.5) / n);
    const cplx V = std::sqrt(a / b) * (v - sy);
    if (std::abs(V) < 1e-300) continue;

    // |U - g/V| <= r on the line Im U = Y
    const cplx c = g / V;
    const double h2 = r * r - (Y - c.imag()) * (Y - c.imag());
    if (h2 < 0) continue;
    const Interval disk{c.real() - std::sqrt(h2), c.real() + std::sqrt(h2)};

    // |V U - g| <= r |U|  <=>  alpha X^2 - 2 Re(w) X + C <= 0
    const double alpha = std::norm(V) - r * r;
    const cplx w = V * std::conj(g);
    const double C = alpha * Y * Y + 2.0 * Y * w.imag() + std::norm(g);
    std::vector<Interval> pieces;
    const double inf = std::numeric_limits<double>::infinity();
    if (alpha == 0.0) {
      if (w.real() > 0) pieces.push_back({C / (2.0 * w.real()), inf});
      else if (w.real() < 0) pieces.push_back({-inf, C / (2.0 * w.real())});
      else if (C <= 0) pieces.push_back({-inf, inf});
    } else {
      const double disc = w.real() * w.real() - alpha * C;
      if (alpha > 0) {
        if (disc >= 0) {
          const double sq = std::sqrt(disc);
          pieces.push_back({(w.real() - sq) / alpha, (w.real() + sq) / alpha});
        }
      } else if (disc <= 0) {
        pieces.push_back({-inf, inf});
      } else {
        const double sq = std::sqrt(disc);
        const double r1 = (w.real() + sq) / alpha, r2 = (w.real() - sq) / alpha;
        pieces.push_back({-inf, std::min(r1, r2)});
        pieces.push_back({std::max(r1, r2), inf});
      }
    }

    double mass = 0.0;
    double span_lo = inf, span_hi = -inf;
    for (const auto& p : pieces) {
      const double lo = std::max(p.lo, disk.lo), hi = std::min(p.hi, disk.hi);
      if (!(hi > lo)) continue;
      span_lo = std::min(span_lo, lo);
      span_hi = std::max(span_hi, hi);
      for (double X : {lo, 0.5 * (lo + hi), hi}) {
        const cplx U(X, Y);
        if (std::min(std::abs(U), std::abs(V)) > wbound * (1.0 + 1e-9) + 1e-12) ++out.w_violations;
      }
      mass += rho_x.cdf(sx.real() + hi / s) - rho_x.cdf(sx.real() + lo / s);
    }
    if (span_hi > span_lo && span_hi - span_lo > 2.0 * r * (1.0 + 1e-9) + 1e-12) ++out.interval_violations;
    total += mass;
  }
  out.lhs = total / n;
  return out;
}

}  // namespace

TwoSiteResult two_site_area_bound(const Distribution& rho1, const Distribution& rho2, cplx sigma_x, cplx sigma_y,
                                  cplx gamma, double a, double b, int n_start, int n_max) {
  if (!(a > 0 && b > 0)) throw std::invalid_argument("two-site bound needs a, b > 0");
  if (!rho1.has_density() || !rho2.has_density()) throw std::invalid_argument("two-site bound needs densities");
  const double rho_inf = std::max(rho1.density_sup(), rho2.density_sup());
  TwoSiteResult res;
  const double ab = std::sqrt(a * b);
  res.rhs = 4.0 * rho_inf * rho_inf * ab *
            std::min(2.0 * (ab + std::sqrt(std::abs(gamma))), std::max(std::sqrt(a / b), std::sqrt(b / a)));

  auto prev = two_site_pass(rho1, rho2, sigma_x, sigma_y, gamma, a, b, n_start);
  std::size_t wv = prev.w_violations, iv = prev.interval_violations;
  for (int n = 2 * n_start; n <= n_max; n *= 2) {
    const auto next = two_site_pass(rho1, rho2, sigma_x, sigma_y, gamma, a, b, n);
    wv += next.w_violations;
    iv += next.interval_violations;
    res.quad_error = std::abs(next.lhs - prev.lhs);
    res.lhs = next.lhs;
    res.n_used = n;
    prev = next;
    if (res.quad_error <= 0.01 * res.rhs) break;
  }
  if (res.quad_error > 0.01 * res.rhs) {
    std::ostringstream os;
    os << "two-site quadrature did not converge: |L_N - L_2N| = " << res.quad_error << " at N = " << res.n_used;
    throw std::runtime_error(os.str());
  }
  const auto swapped = two_site_pass(rho2, rho1, sigma_y, sigma_x, gamma, b, a, res.n_used);
  res.swapped_lhs = swapped.lhs;
  res.w_bound_violations = wv + swapped.w_violations;
  res.interval_violations = iv + swapped.interval_violations;
  res.holds = res.lhs <= res.rhs + res.quad_error;
  return res;
}

DeltaPrincipleResult delta_principle(const Distribution& V, const std::optional<Distribution>& X, double delta,
                                     const EtaLadder& ladder, int replicates, std::uint64_t seed,
                                     double c_scale) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  if (replicates < 2) throw std::invalid_argument("delta principle needs >= 2 replicates");
  if (!V.has_density()) throw std::invalid_argument("V must have a density");
  const auto cond = check_density_condition(V, delta);
  if (!cond.holds) throw std::invalid_argument("density condition fails for " + V.describe());

  DeltaPrincipleResult res;
  res.c = cond.c * c_scale;
  res.etas = ladder.values();
  Rng rng = make_stream(seed, StreamTag::delta, {});
  std::vector<double> t(static_cast<std::size_t>(replicates)), xs(t.size(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double v = V.sample(rng);
    if (X) xs[i] = X->sample(rng);
    t[i] = v - xs[i];
  }
  std::vector<double> vals(t.size());
  for (double eta : res.etas) {
    for (std::size_t i = 0; i < t.size(); ++i) vals[i] = eta / (t[i] * t[i] + eta * eta) / std::numbers::pi;
    const auto m = mean_stderr(vals);
    res.lhs.push_back(m.mean);
    res.lhs_err.push_back(m.stderr_);
  }
  res.lhs_limit = res.lhs.back();
  res.lhs_limit_err = res.lhs_err.back();

  res.smoothed_inf = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 32; ++k) {
    const double eps = delta * k / 32.0;
    double p, se = 0.0;
    if (!X) {
      p = V.cdf(eps) - V.cdf(-eps);
    } else {
      for (std::size_t i = 0; i < xs.size(); ++i) vals[i] = V.cdf(xs[i] + eps) - V.cdf(xs[i] - eps);
      const auto m = mean_stderr(vals);
      p = m.mean;
      se = m.stderr_;
    }
    const double smoothed = p / (2.0 * eps);
    if (smoothed < res.smoothed_inf) {
      res.smoothed_inf = smoothed;
      res.rhs_err = res.c * se / (2.0 * eps);
    }
  }
  res.rhs = res.c * res.smoothed_inf;
  res.holds = res.lhs_limit <= res.rhs + 3.0 * std::hypot(res.lhs_limit_err, res.rhs_err);
  return res;
}

SimplicityResult spectrum_simplicity(const OperatorModel& model, int replicates, double gap_tol, const Exec& exec) {
  if (model.graph.vertex_count() > 512) throw std::invalid_argument("spectrum_simplicity needs N <= 512");
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  SimplicityResult res;
  res.min_gaps = map_indexed<double>(static_cast<std::size_t>(replicates), exec, [&](std::size_t r) {
    const auto s = sample_potential(model, r);
    const Eigen::MatrixXd h = hamiltonian(model, s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw IntegrityError("eigensolver failed");
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 1; k < h.rows(); ++k) gap = std::min(gap, es.eigenvalues()(k) - es.eigenvalues()(k - 1));
    return gap;
  });
  const auto degenerate = std::count_if(res.min_gaps.begin(), res.min_gaps.end(), [&](double g) { return g < gap_tol; });
  res.frac_degenerate = static_cast<double>(degenerate) / replicates;
  return res;
}

NullAverageResult spectral_null_average(const Eigen::MatrixXd& h0, const Eigen::VectorXd& psi,
                                        const std::vector<double>& energies,
                                        const std::function<double(Rng&)>& sampler, int replicates,
                                        std::uint64_t seed, bool continuous_law) {
  const Eigen::Index n = h0.rows();
  NullAverageResult res;
  res.hypothesis_violated = !continuous_law;
  const Eigen::MatrixXd p = psi * psi.transpose();
  for (double E : energies) {
    const Eigen::VectorXd w = (h0 - E * Eigen::MatrixXd::Identity(n, n)).lu().solve(psi);
    res.exceptional_v.push_back(-1.0 / psi.dot(w));
  }
  Rng rng = make_stream(seed, StreamTag::theorem, {0x5a11});
  int hits = 0;
  for (int r = 0; r < replicates; ++r) {
    const double v = sampler(rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h0 + v * p, Eigen::EigenvaluesOnly);
    bool hit = false;
    for (double E : energies) hit = hit || distance_to_spectrum(es.eigenvalues(), E) <= 1e-8;
    hits += hit ? 1 : 0;
  }
  res.frac_hitting = static_cast<double>(hits) / replicates;
  return res;
}

}  // namespace resdeloc

namespace resdeloc {

double IdentityGaps::max() const { return std::max({rank_one, two_site, sigma_tau, g_ratio, sum_rule}); }

Eigen::MatrixXd random_instance(std::uint64_t seed, std::uint64_t index, VertexId* origin) {
  Rng rng = make_stream(seed, StreamTag::theorem, {0x1d, index});
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1)); };
  std::optional<Graph> g;
  switch (index % 4) {
    case 0: {
      const int dim = pick(1, 3);
      std::vector<std::size_t> dims;
      const int side = dim == 1 ? pick(4, 64) : dim == 2 ? pick(2, 8) : pick(2, 4);
      for (int i = 0; i < dim; ++i) dims.push_back(static_cast<std::size_t>(side));
      g = make_box(dims);
      break;
    }
    case 1: g = pick(0, 1) ? make_tree(2, 4) : make_tree(3, 3); break;
    case 2: g = make_complete(static_cast<std::size_t>(pick(3, 16))); break;
    default: {
      const std::size_t n = static_cast<std::size_t>(pick(8, 40));
      std::vector<std::pair<VertexId, VertexId>> edges;
      std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
      for (VertexId v = 1; v < n; ++v) {
        const auto u = static_cast<VertexId>(uniform01(rng) * static_cast<double>(v));
        edges.emplace_back(u, v);
        used[u][v] = used[v][u] = true;
      }
      for (std::size_t e = 0; e < n / 2; ++e) {
        const auto u = static_cast<VertexId>(uniform01(rng) * static_cast<double>(n));
        const auto v = static_cast<VertexId>(uniform01(rng) * static_cast<double>(n));
        if (u == v || used[u][v]) continue;
        edges.emplace_back(u, v);
        used[u][v] = used[v][u] = true;
      }
      g = make_custom(n, edges, static_cast<VertexId>(uniform01(rng) * static_cast<double>(n)));
    }
  }
  const double lambda = 0.5 + 2.5 * uniform01(rng);
  OperatorModel model{*g, Distribution::uniform(-1.0, 1.0), lambda, seed ^ (index * 0x9e3779b97f4a7c15ULL), 1.0};
  *origin = g->origin();
  return hamiltonian(model, sample_potential(model, index));
}

IdentityGaps exact_identity_suite(std::uint64_t seed, int instances, int rungs, const Exec& exec) {
  const EtaLadder ladder{0.1, rungs};
  const auto per = map_indexed<IdentityGaps>(static_cast<std::size_t>(instances), exec, [&](std::size_t i) {
    VertexId o = 0;
    const Eigen::MatrixXd h = random_instance(seed, i, &o);
    Rng rng = make_stream(seed, StreamTag::theorem, {0x1e, i});
    const auto n = static_cast<VertexId>(h.rows());
    VertexId x = static_cast<VertexId>(uniform01(rng) * static_cast<double>(n));
    if (x == o) x = (x + 1) % n;
    VertexId y = static_cast<VertexId>(uniform01(rng) * static_cast<double>(n));
    if (y == x) y = (y + 1) % n;
    const double E = 6.0 * uniform01(rng) - 3.0;
    IdentityGaps gaps;
    const auto xi = static_cast<Eigen::Index>(x), oi = static_cast<Eigen::Index>(o);
    for (double eta : ladder.values()) {
      const ComplexEnergy z(E, eta);
      const Resolvent r(h, z);
      const Eigen::VectorXcd gx = r.column(x);
      const Eigen::VectorXcd g0 = r.column(o);
      gaps.rank_one = std::max(gaps.rank_one, rel_gap(h(xi, xi) - 1.0 / gx(xi), self_energy_restricted(h, x, z)));

      const SchurData d = schur_two_site(r, x, y, false);
      const SchurData e = schur_elimination(h, x, y, z);
      gaps.two_site = std::max({gaps.two_site, rel_gap(d.sigma_x, e.sigma_x), rel_gap(d.sigma_y, e.sigma_y),
                                rel_gap(d.tau_xy, e.tau_xy), rel_gap(d.tau_yx, e.tau_yx)});

      const SchurData s = schur_two_site(r, x, o, false);
      gaps.sigma_tau = std::max(gaps.sigma_tau,
                                rel_gap(s.Sigma_x, s.sigma_x + s.tau_xy * s.tau_yx / (h(oi, oi) - s.sigma_y)));

      const SchurData p = schur_two_site(r, o, x, false);
      gaps.g_ratio = std::max(gaps.g_ratio, rel_gap(g0(xi) / g0(oi), p.tau_xy / (h(xi, xi) - p.sigma_y)));

      gaps.sum_rule = std::max(gaps.sum_rule, rel_gap(gx.squaredNorm(), gx(xi).imag() / eta));
      ++gaps.evaluations;
    }
    gaps.instances = 1;
    return gaps;
  });
  IdentityGaps total;
  for (const auto& g : per) {
    total.rank_one = std::max(total.rank_one, g.rank_one);
    total.two_site = std::max(total.two_site, g.two_site);
    total.sigma_tau = std::max(total.sigma_tau, g.sigma_tau);
    total.g_ratio = std::max(total.g_ratio, g.g_ratio);
    total.sum_rule = std::max(total.sum_rule, g.sum_rule);
    total.instances += g.instances;
    total.evaluations += g.evaluations;
  }
  return total;
}

}  // namespace resdeloc

namespace resdeloc {

RankOneCase make_rank_one_case(std::uint64_t seed, std::uint64_t index) {
  Rng rng = make_stream(seed, StreamTag::theorem, {0x41, index});
  const int n = 10 + static_cast<int>(uniform01(rng) * 31);
  RankOneCase c;
  c.h0.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) c.h0(i, j) = c.h0(j, i) = 2.0 * uniform01(rng) - 1.0;
  c.psi.resize(n);
  for (int i = 0; i < n; ++i) c.psi(i) = 2.0 * uniform01(rng) - 1.0;
  c.psi.normalize();
  const auto dec = spectral_decomposition(c.h0);
  const int k = static_cast<int>(uniform01(rng) * (n - 1));
  c.E = 0.5 * (dec.eigenvalues(k) + dec.eigenvalues(k + 1));
  return c;
}

TwoSiteDraw random_two_site_draw(std::uint64_t seed, std::uint64_t index) {
  Rng rng = make_stream(seed, StreamTag::theorem, {0x2a, index});
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(rng); };
  TwoSiteDraw d;
  d.sigma_x = {u(-0.5, 1.5), u(0.0, 0.5)};
  d.sigma_y = {u(-0.5, 1.5), u(0.0, 0.5)};
  d.gamma = std::polar(u(0.0, 1.0), u(-std::numbers::pi, std::numbers::pi));
  d.a = std::exp(u(std::log(0.01), 0.0));
  d.b = std::exp(u(std::log(0.01), 0.0));
  return d;
}

}  // namespace resdeloc
