#include "resdeloc/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "resdeloc/errors.hpp"

namespace resdeloc {

namespace {

struct SiteData {
  cplx tau;
  cplx tau_back;
  cplx root_gap;
  cplx site_gap;
  cplx Sigma;
  cplx g;
};

// Uniform access to the pair data on trees (recursion) and other graphs (dense).
class Oracle {
 public:
  Oracle(const OperatorModel& m, const PotentialSample& s, ComplexEnergy z, TreeBoundary b, const BoundaryPool* pool,
         bool up_functions)
      : model_(&m), sample_(&s) {
    if (m.graph.kind() == GraphKind::tree) {
      tree_.emplace(m, s, z, b, pool, up_functions);
    } else {
      h_ = std::make_unique<Eigen::MatrixXd>(hamiltonian(m, s));
      res_.emplace(*h_, z);
      g0_ = res_->column(m.graph.origin());
    }
  }

  const TreeGreen* tree() const { return tree_ ? &*tree_ : nullptr; }

  SiteData site(VertexId x) const {
    const VertexId o = model_->graph.origin();
    if (x == o) throw std::invalid_argument("resonance events need x != origin");
    SiteData d;
    if (tree_) {
      const RootPair rp = tree_->root_pair(x);
      d.tau = d.tau_back = rp.tau;
      d.root_gap = rp.root_gap;
      d.site_gap = rp.site_gap;
      d.Sigma = tree_->has_up_functions()
                    ? tree_->self_energy(x)
                    : sample_->values[x] - rp.site_gap + rp.tau * rp.tau / rp.root_gap;
      d.g = tree_->g_ratio(x);
      return d;
    }
    const auto xi = static_cast<Eigen::Index>(x), oi = static_cast<Eigen::Index>(o);
    const Eigen::VectorXcd gx = res_->column(x);
    Eigen::Matrix2cd block;
    block << g0_(oi), gx(oi), g0_(xi), gx(xi);
    const Eigen::Matrix2cd inv = block.inverse();
    d.root_gap = inv(0, 0);
    d.site_gap = inv(1, 1);
    d.tau = -inv(0, 1);
    d.tau_back = -inv(1, 0);
    d.Sigma = (*h_)(xi, xi) - 1.0 / gx(xi);
    d.g = g0_(xi) / g0_(oi);
    return d;
  }

  cplx tau_pair(VertexId x, VertexId y) const {
    if (tree_) return tree_->pair(x, y).tau;
    return schur_two_site(*res_, x, y).tau_xy;
  }

  cplx sigma_origin() const {
    const VertexId o = model_->graph.origin();
    if (tree_) return tree_->self_energy(o);
    return (*h_)(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(o)) - 1.0 / g0_(static_cast<Eigen::Index>(o));
  }

 private:
  const OperatorModel* model_;
  const PotentialSample* sample_;
  std::optional<TreeGreen> tree_;
  std::unique_ptr<Eigen::MatrixXd> h_;
  std::optional<Resolvent> res_;
  Eigen::VectorXcd g0_;
};

std::vector<VertexId> subsample(const std::vector<VertexId>& members, std::size_t m) {
  if (members.size() <= m) return members;
  std::vector<VertexId> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = members[j * members.size() / m];
  return out;
}

double origin_dos_sample(const OperatorModel& model, double v0, cplx sigma0) {
  if (model.lambda > 0) return averaged_spectral_density(model.dist.scaled(model.lambda), sigma0);
  return (1.0 / (v0 - sigma0)).imag() / std::numbers::pi;
}

std::optional<BoundaryPool> pool_for(const OperatorModel& model, double E, const ResonanceOptions& opt) {
  if (model.graph.kind() != GraphKind::tree) return std::nullopt;
  return make_pool(model, ComplexEnergy(E, opt.eta), opt.boundary);
}

ResonanceEvents evaluate(const SiteData& d, VertexId x, int dist, double vx, double t, const ResonanceOptions& opt) {
  ResonanceEvents ev;
  ev.x = x;
  ev.distance = dist;
  ev.tau_abs = std::abs(d.tau);
  ev.tau_back_abs = std::abs(d.tau_back);
  ev.resonance_gap = std::abs(vx - d.Sigma);
  ev.root_gap = std::abs(d.root_gap);
  ev.T = ev.tau_abs >= t;
  ev.E = ev.resonance_gap <= t;
  ev.N = ev.root_gap >= ev.tau_back_abs;
  const cplx g = opt.g_filter ? opt.g_filter(d.g) : d.g;
  ev.g_abs = std::abs(g);
  if (ev.all() && !(ev.g_abs >= 0.49)) {
    std::ostringstream os;
    os << "resonance: |g(x)| = " << ev.g_abs << " < 0.49 at x=" << x << " with T, E and N all holding"
       << " (|tau|=" << ev.tau_abs << ", gap=" << ev.resonance_gap << ", t=" << t << ")";
    throw IntegrityError(os.str());
  }
  return ev;
}

const std::vector<VertexId>& sphere_members(const Graph& g, int d, std::vector<std::vector<VertexId>>& cache) {
  if (cache.size() <= static_cast<std::size_t>(d)) cache.resize(static_cast<std::size_t>(d) + 1);
  auto& slot = cache[static_cast<std::size_t>(d)];
  if (slot.empty()) slot = sphere(g, g.origin(), d).members;
  return slot;
}

}  // namespace

double CutoffFunction::at(int d) const {
  if (d < 0 || static_cast<std::size_t>(d) >= t.size()) throw std::out_of_range("cutoff not calibrated at this distance");
  return t[static_cast<std::size_t>(d)];
}

CutoffFunction calibrate_cutoff(const OperatorModel& model, double E, double delta, int r_max, int replicates,
                                const ResonanceOptions& opt) {
  if (!(delta > 0 && delta < 0.5)) throw std::invalid_argument("calibrate_cutoff: delta must be in (0, 0.5)");
  if (r_max < 1 || replicates < 1) throw std::invalid_argument("calibrate_cutoff: r_max and replicates must be >= 1");
  const GraphKind kind = model.graph.kind();
  if (kind != GraphKind::tree && kind != GraphKind::box)
    throw std::invalid_argument("calibrate_cutoff: tree or box topology required");
  std::vector<std::vector<VertexId>> spheres(static_cast<std::size_t>(r_max) + 1);
  for (int d = 1; d <= r_max; ++d) {
    spheres[static_cast<std::size_t>(d)] = subsample(sphere(model.graph, model.graph.origin(), d).members, opt.per_sphere);
    if (spheres[static_cast<std::size_t>(d)].empty())
      throw std::invalid_argument("calibrate_cutoff: empty sphere at d=" + std::to_string(d));
  }
  const auto pool = pool_for(model, E, opt);
  const auto reps = static_cast<std::size_t>(replicates);
  // per replicate, per distance: |tau| values
  std::vector<std::vector<std::vector<double>>> taus(reps);
  for_each_index(reps, opt.exec, [&](std::size_t r) {
    const PotentialSample s = sample_potential(model, r, {StreamTag::calibration, {}});
    const Oracle oracle(model, s, ComplexEnergy(E, opt.eta), opt.boundary, pool ? &*pool : nullptr, false);
    auto& mine = taus[r];
    mine.resize(static_cast<std::size_t>(r_max) + 1);
    for (int d = 1; d <= r_max; ++d)
      for (VertexId x : spheres[static_cast<std::size_t>(d)])
        mine[static_cast<std::size_t>(d)].push_back(std::abs(oracle.site(x).tau));
  });
  CutoffFunction c;
  c.E = E;
  c.delta = delta;
  c.t.assign(static_cast<std::size_t>(r_max) + 1, 1.0);
  for (int d = 1; d <= r_max; ++d) {
    std::vector<double> pooled;
    for (const auto& mine : taus)
      pooled.insert(pooled.end(), mine[static_cast<std::size_t>(d)].begin(), mine[static_cast<std::size_t>(d)].end());
    const double q = lower_quantile(pooled, delta);
    c.t[static_cast<std::size_t>(d)] = std::clamp(q, std::numeric_limits<double>::min(), 1.0);
  }
  return c;
}

ResonanceEvents detect_events(const OperatorModel& model, const PotentialSample& sample, VertexId x, double E,
                              const CutoffFunction& cutoff, const ResonanceOptions& opt) {
  const auto pool = pool_for(model, E, opt);
  const Oracle oracle(model, sample, ComplexEnergy(E, opt.eta), opt.boundary, pool ? &*pool : nullptr, true);
  const int d = model.graph.origin_distances()[x];
  return evaluate(oracle.site(x), x, d, sample.values[x], cutoff.at(d), opt);
}

MeanEstimate truncated_mean_T(const OperatorModel& model, VertexId x, VertexId y, double E, int replicates,
                              const ResonanceOptions& opt) {
  if (x == y) throw std::invalid_argument("truncated_mean_T requires x != y");
  const auto pool = pool_for(model, E, opt);
  const bool need_up = x != model.graph.origin() && y != model.graph.origin();
  std::vector<double> vals = map_indexed<double>(static_cast<std::size_t>(replicates), opt.exec, [&](std::size_t r) {
    const PotentialSample s = sample_potential(model, r, {StreamTag::pair_statistics, {}});
    const Oracle oracle(model, s, ComplexEnergy(E, opt.eta), opt.boundary, pool ? &*pool : nullptr, need_up);
    return std::min(std::abs(oracle.tau_pair(x, y)), 1.0);
  });
  return mean_stderr(vals);
}

double estimate_CT(const OperatorModel& model, double E, int R, const CutoffFunction& cutoff,
                   const ResonanceOptions& opt) {
  const auto members = sphere(model.graph, model.graph.origin(), R).members;
  if (members.size() < 2) return 0.0;
  const auto xs = subsample(members, static_cast<std::size_t>(std::max(opt.ct_sites, 1)));
  // partner lists per x, with the scale that turns the subsample into a sphere sum
  std::vector<std::vector<VertexId>> partners(xs.size());
  std::vector<double> scale(xs.size(), 1.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<VertexId> others;
    for (VertexId y : members)
      if (y != xs[i]) others.push_back(y);
    if (others.size() > 512) {
      partners[i] = subsample(others, static_cast<std::size_t>(opt.ct_partners));
      scale[i] = static_cast<double>(others.size()) / static_cast<double>(partners[i].size());
    } else {
      partners[i] = others;
    }
  }
  const auto pool = pool_for(model, E, opt);
  const auto reps = static_cast<std::size_t>(std::max(opt.ct_replicates, 1));
  // per replicate: sum_y min(|tau|,1) per x
  std::vector<std::vector<double>> sums(reps, std::vector<double>(xs.size(), 0.0));
  for_each_index(reps, opt.exec, [&](std::size_t r) {
    const PotentialSample s = sample_potential(model, r, {StreamTag::pair_statistics, {static_cast<std::uint64_t>(R)}});
    const Oracle oracle(model, s, ComplexEnergy(E, opt.eta), opt.boundary, pool ? &*pool : nullptr, true);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (VertexId y : partners[i]) sums[r][i] += std::min(std::abs(oracle.tau_pair(xs[i], y)), 1.0);
  });
  const double denom = static_cast<double>(members.size()) * cutoff.at(R);
  double ct = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double total = 0.0;
    for (std::size_t r = 0; r < reps; ++r) total += sums[r][i];
    ct = std::max(ct, scale[i] * total / static_cast<double>(reps) / denom);
  }
  return ct;
}

std::vector<PZPoint> paley_zygmund(const std::vector<double>& counts, const std::vector<double>& thetas) {
  std::vector<PZPoint> out;
  if (counts.empty()) return out;
  const double n = static_cast<double>(counts.size());
  double m1 = 0, m2 = 0;
  for (double c : counts) {
    m1 += c;
    m2 += c * c;
  }
  m1 /= n;
  m2 /= n;
  for (double th : thetas) {
    PZPoint p;
    p.theta = th;
    double hits = 0;
    for (double c : counts) hits += c >= th * m1;
    p.prob = hits / n;
    p.bound = m2 > 0 ? (1 - th) * (1 - th) * m1 * m1 / m2 : 0.0;
    p.stderr_ = std::sqrt(p.prob * (1 - p.prob) / n);
    p.holds = p.prob >= p.bound - 3 * p.stderr_;
    out.push_back(p);
  }
  return out;
}

ResonanceReport resonance_report(const OperatorModel& model, double E, int R, int replicates,
                                 const CutoffFunction& cutoff, const ResonanceOptions& opt) {
  if (replicates < 2) throw std::invalid_argument("resonance_report needs >= 2 replicates");
  const auto members = sphere(model.graph, model.graph.origin(), R).members;
  if (members.empty()) throw std::invalid_argument("resonance_report: empty sphere");
  const double t = cutoff.at(R);
  const auto pool = pool_for(model, E, opt);
  const auto reps = static_cast<std::size_t>(replicates);

  struct Row {
    int count = 0;
    double n_sample = 0.0;
    double im_sigma0 = 0.0;
    double min_g = std::numeric_limits<double>::infinity();
  };
  std::vector<Row> rows(reps);
  for_each_index(reps, opt.exec, [&](std::size_t r) {
    const PotentialSample s = sample_potential(model, r);
    const Oracle oracle(model, s, ComplexEnergy(E, opt.eta), opt.boundary, pool ? &*pool : nullptr, true);
    Row& row = rows[r];
    const cplx sigma0 = oracle.sigma_origin();
    row.im_sigma0 = std::abs(sigma0.imag());
    row.n_sample = origin_dos_sample(model, s.values[model.graph.origin()], sigma0);
    for (VertexId x : members) {
      const ResonanceEvents ev = evaluate(oracle.site(x), x, R, s.values[x], t, opt);
      if (ev.all()) {
        ++row.count;
        row.min_g = std::min(row.min_g, ev.g_abs);
      }
    }
  });

  ResonanceReport rep;
  rep.R = R;
  rep.E = E;
  std::vector<double> n_vals(reps), a_vals(reps), b_vals(reps), ns(reps);
  double im_sum = 0.0;
  rep.min_g_abs = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < reps; ++r) {
    rep.counts.push_back(rows[r].count);
    b_vals[r] = rows[r].count;
    a_vals[r] = static_cast<double>(rows[r].count) * (rows[r].count - 1);
    ns[r] = rows[r].n_sample;
    im_sum += rows[r].im_sigma0;
    rep.triple_events += static_cast<std::size_t>(rows[r].count);
    rep.min_g_abs = std::min(rep.min_g_abs, rows[r].min_g);
  }
  rep.mean_abs_im_sigma_origin = im_sum / static_cast<double>(reps);
  rep.mean_N = mean_stderr(b_vals);
  rep.n_E = mean_stderr(ns);
  rep.sphere_cutoff_sum = static_cast<double>(members.size()) * t;
  rep.first_moment_bound = 0.5 * rep.n_E.mean * rep.sphere_cutoff_sum;
  rep.first_moment_ok = rep.mean_N.mean >= rep.first_moment_bound - 3.0 * rep.mean_N.stderr_;
  rep.rho_sup = model.effective_density_sup();
  rep.C_T = estimate_CT(model, E, R, cutoff, opt);
  rep.second_moment_bound = 8.0 * rep.rho_sup * rep.rho_sup * (1.0 + rep.C_T);
  rep.pz = paley_zygmund(b_vals);
  rep.pz_ok = std::all_of(rep.pz.begin(), rep.pz.end(), [](const PZPoint& p) { return p.holds; });

  const double B = rep.mean_N.mean;
  if (B <= 0.0) {
    rep.degenerate = true;
    return rep;
  }
  const double n = static_cast<double>(reps);
  const MeanEstimate A = mean_stderr(a_vals);
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    cov += (a_vals[r] - A.mean) * (b_vals[r] - B);
    var_a += (a_vals[r] - A.mean) * (a_vals[r] - A.mean);
    var_b += (b_vals[r] - B) * (b_vals[r] - B);
  }
  cov /= n - 1;
  var_a /= n - 1;
  var_b /= n - 1;
  rep.second_moment_ratio = A.mean / (B * B);
  const double var_ratio = (var_a / std::pow(B, 4) + 4 * A.mean * A.mean * var_b / std::pow(B, 6) -
                            4 * A.mean * cov / std::pow(B, 5)) / n;
  rep.second_moment_stderr = std::sqrt(std::max(var_ratio, 0.0));
  rep.second_moment_ok = rep.second_moment_ratio <= rep.second_moment_bound + 3.0 * rep.second_moment_stderr;
  return rep;
}

ForcedResonanceStats forced_resonance_check(const OperatorModel& model, double E, const CutoffFunction& cutoff,
                                            const std::vector<int>& radii, int replicates,
                                            const ResonanceOptions& opt) {
  const auto pool = pool_for(model, E, opt);
  std::vector<std::vector<VertexId>> cache;
  std::vector<VertexId> sites;
  std::vector<int> dist;
  for (int R : radii) {
    for (VertexId x : subsample(sphere_members(model.graph, R, cache), opt.per_sphere)) {
      sites.push_back(x);
      dist.push_back(R);
    }
  }
  struct Row {
    std::size_t attempts = 0, triples = 0;
    double min_g = std::numeric_limits<double>::infinity();
    double max_gap = 0.0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(replicates));
  const bool tree = model.graph.kind() == GraphKind::tree;
  for_each_index(rows.size(), opt.exec, [&](std::size_t r) {
    const PotentialSample s = sample_potential(model, r, {StreamTag::theorem, {0x5e5}});
    const Oracle oracle(model, s, ComplexEnergy(E, opt.eta), opt.boundary, pool ? &*pool : nullptr, true);
    std::optional<Eigen::MatrixXd> h;
    if (!tree) h = hamiltonian(model, s);
    Row& row = rows[r];
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const VertexId x = sites[i];
      SiteData d = oracle.site(x);
      const double forced = d.Sigma.real();
      if (tree) {
        d.g = oracle.tree()->g_ratio_with(x, forced);
      } else {
        Eigen::MatrixXd hf = *h;
        hf(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = forced;
        d.g = g_ratio(hf, x, ComplexEnergy(E, opt.eta), false, model.graph.origin());
      }
      const ResonanceEvents ev = evaluate(d, x, dist[i], forced, cutoff.at(dist[i]), opt);
      ++row.attempts;
      row.max_gap = std::max(row.max_gap, ev.resonance_gap);
      if (ev.all()) {
        ++row.triples;
        row.min_g = std::min(row.min_g, ev.g_abs);
      }
    }
  });
  ForcedResonanceStats st;
  st.min_g_abs = std::numeric_limits<double>::infinity();
  for (const Row& row : rows) {
    st.attempts += row.attempts;
    st.triple_events += row.triples;
    st.min_g_abs = std::min(st.min_g_abs, row.min_g);
    st.max_resonance_gap = std::max(st.max_resonance_gap, row.max_gap);
  }
  return st;
}

ConditionsA123 check_conditions_A123(const OperatorModel& model, double E, const std::vector<int>& radii,
                                     double delta, int replicates, const ResonanceOptions& opt) {
  if (radii.empty()) throw std::invalid_argument("check_conditions_A123: empty radius list");
  const int r_max = *std::max_element(radii.begin(), radii.end());
  const CutoffFunction cutoff = calibrate_cutoff(model, E, delta, r_max, replicates, opt);
  ConditionsA123 out;
  out.radii = radii;
  const VertexId o = model.graph.origin();
  for (int R : radii) {
    const auto members = sphere(model.graph, o, R).members;
    out.cutoff_sum.push_back(static_cast<double>(members.size()) * cutoff.at(R));
    double max_t = 0.0;
    for (VertexId x : subsample(members, static_cast<std::size_t>(std::max(opt.ct_sites, 1))))
      max_t = std::max(max_t, truncated_mean_T(model, x, o, E, replicates, opt).mean);
    out.max_T.push_back(max_t);
    out.C_T.push_back(estimate_CT(model, E, R, cutoff, opt));
  }
  const auto pool = pool_for(model, E, opt);
  std::vector<double> ns = map_indexed<double>(static_cast<std::size_t>(replicates), opt.exec, [&](std::size_t r) {
    const PotentialSample s = sample_potential(model, r);
    const Oracle oracle(model, s, ComplexEnergy(E, opt.eta), opt.boundary, pool ? &*pool : nullptr, false);
    return origin_dos_sample(model, s.values[o], oracle.sigma_origin());
  });
  out.n_E = mean_stderr(ns);
  out.A3_positive = out.n_E.mean > 3.0 * out.n_E.stderr_ && out.n_E.mean > 1e-4;
  if (radii.size() >= 2) {
    std::vector<double> xr(radii.begin(), radii.end()), ly;
    for (double s : out.cutoff_sum) ly.push_back(std::log(s));
    out.cutoff_sum_log_slope = linear_fit(xr, ly).slope;
    out.A1_growth = out.cutoff_sum_log_slope > 0.0;
    out.A1_T_decay = out.max_T.back() < out.max_T.front();
  }
  return out;
}

}  // namespace resdeloc
