#include "resdeloc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "resdeloc/errors.hpp"
#include "resdeloc/stats.hpp"

namespace resdeloc {

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

void check_trace(const GammaTrace& t) {
  for (std::size_t k = 0; k < t.points.size(); ++k) {
    const auto& p = t.points[k];
    const double route = rel(p.gamma_sum, p.gamma_im);
    if (route > 1e-8) {
      std::ostringstream os;
      os << "gamma: sum route " << p.gamma_sum << " and Im G/eta route " << p.gamma_im
         << " disagree at eta=" << p.eta << " (rel " << route << ")";
      throw IntegrityError(os.str());
    }
    const double id = rel(p.kappa * std::norm(p.G), p.gamma_im);
    if (id > 1e-8) {
      std::ostringstream os;
      os << "kappa: kappa*|G|^2 != gamma at eta=" << p.eta << " (rel " << id << ")";
      throw IntegrityError(os.str());
    }
    if (k > 0 && p.eta < t.points[k - 1].eta && p.gamma_im < t.points[k - 1].gamma_im * (1.0 - 1e-10)) {
      std::ostringstream os;
      os << "gamma: not monotone in eta at eta=" << p.eta;
      throw IntegrityError(os.str());
    }
  }
}

GammaPoint point_from(cplx g, double eta, double sum) {
  GammaPoint p;
  p.eta = eta;
  p.G = g;
  p.gamma_sum = sum;
  p.gamma_im = g.imag() / eta;
  p.kappa = -(1.0 / g).imag() / eta;
  return p;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::diverging: return "diverging";
    case Verdict::finite: return "finite";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

GammaTrace gamma(const Eigen::MatrixXd& h, VertexId x, double E, const EtaLadder& ladder) {
  GammaTrace t;
  t.x = x;
  t.E = E;
  for (double eta : ladder.values()) {
    const auto col = green_column(h, x, ComplexEnergy(E, eta));
    t.points.push_back(point_from(col.values(static_cast<Eigen::Index>(x)), eta, col.values.squaredNorm()));
  }
  check_trace(t);
  return t;
}

GammaTrace kappa(const Eigen::MatrixXd& h, VertexId x, double E, const EtaLadder& ladder) {
  return gamma(h, x, E, ladder);
}

GammaTrace gamma_tree(const OperatorModel& model, const PotentialSample& sample, double E,
                      const EtaLadder& ladder, TreeBoundary boundary, const std::vector<BoundaryPool>* pools) {
  GammaTrace t;
  t.x = model.graph.origin();
  t.E = E;
  const auto etas = ladder.values();
  if (needs_pool(boundary) && (pools == nullptr || pools->size() != etas.size()))
    throw std::invalid_argument("gamma_tree: one boundary pool per ladder rung required");
  for (std::size_t k = 0; k < etas.size(); ++k) {
    const BoundaryPool* pool = needs_pool(boundary) ? &(*pools)[k] : nullptr;
    const TreeGreen tg(model, sample, ComplexEnergy(E, etas[k]), boundary, pool);
    const auto row = tg.root_row();
    double sum = 0.0;
    for (const auto& g : row) sum += std::norm(g);
    sum += tg.root_leakage(row) / etas[k];
    t.points.push_back(point_from(tg.G00(), etas[k], sum));
  }
  check_trace(t);
  return t;
}

DivergenceVerdict divergence_verdict(const std::vector<double>& etas, const std::vector<double>& values,
                                     const DivergenceThresholds& th) {
  if (etas.size() != values.size()) throw std::invalid_argument("divergence_verdict: size mismatch");
  const auto n = etas.size();
  const auto need = static_cast<std::size_t>(std::max(th.fit_rungs, th.plateau_rungs));
  if (n < need || th.fit_rungs < 2 || th.plateau_rungs < 2)
    throw std::invalid_argument("divergence_verdict: ladder shorter than the fit window");
  DivergenceVerdict v;
  std::vector<double> lx, ly;
  for (std::size_t k = n - static_cast<std::size_t>(th.fit_rungs); k < n; ++k) {
    lx.push_back(std::log(etas[k]));
    ly.push_back(std::log(std::max(values[k], 1e-300)));
  }
  const LinearFit fit = linear_fit(lx, ly);
  v.p = -fit.slope;
  v.r2 = fit.r2;
  const double last = values[n - 1];
  const double earlier = values[n - static_cast<std::size_t>(th.plateau_rungs)];
  if (v.p >= th.p_min && v.r2 >= th.r2_min) {
    v.verdict = Verdict::diverging;
  } else if (std::abs(last - earlier) < th.plateau_rel * std::abs(last)) {
    v.verdict = Verdict::finite;
    v.plateau = last;
  }
  return v;
}

DivergenceVerdict divergence_verdict(const GammaTrace& trace, const DivergenceThresholds& th) {
  std::vector<double> etas, values;
  for (const auto& p : trace.points) {
    etas.push_back(p.eta);
    values.push_back(p.gamma_im);
  }
  return divergence_verdict(etas, values, th);
}

double averaged_spectral_density(const Distribution& law, cplx sigma) {
  const double s_im = std::max(sigma.imag(), 0.0);
  switch (law.kind) {
    case DistKind::uniform: {
      const double a = law.p1, b = law.p2, x = sigma.real();
      if (s_im == 0.0) return (x > a && x < b) ? 1.0 / (b - a) : 0.0;
      return (std::atan((b - x) / s_im) - std::atan((a - x) / s_im)) / (std::numbers::pi * (b - a));
    }
    case DistKind::cauchy: {
      const double w = law.p2 + s_im, d = sigma.real() - law.p1;
      return w / (std::numbers::pi * (d * d + w * w));
    }
    default: break;
  }
  throw std::invalid_argument("spectral averaging implemented for uniform and cauchy laws only");
}

std::vector<DosEstimate> dos_scan(const OperatorModel& model, const std::vector<double>& energies, double eta,
                                  int replicates, const DosOptions& opt) {
  if (!model.dist.has_density()) throw std::invalid_argument("dos: bernoulli law has no density");
  if (!(model.lambda > 0)) throw std::invalid_argument("dos: lambda must be > 0");
  if (replicates < 1) throw std::invalid_argument("dos: replicates must be >= 1");
  if (!(eta > 0)) throw std::invalid_argument("dos: eta must be > 0");
  const Distribution law = model.dist.scaled(model.lambda);
  const std::size_t ne = energies.size();
  const auto reps = static_cast<std::size_t>(replicates);
  const VertexId o = model.graph.origin();
  const bool tree = model.graph.kind() == GraphKind::tree;
  const bool averaged = opt.estimator == DosEstimator::spectral_average;

  std::vector<BoundaryPool> pools;
  if (tree && needs_pool(opt.boundary)) {
    pools.resize(ne);
    for_each_index(ne, opt.exec, [&](std::size_t i) {
      pools[i] = *make_pool(model, ComplexEnergy(energies[i], eta), opt.boundary);
    });
  }

  // samples[r * ne + i]
  std::vector<double> samples(reps * ne);
  for_each_index(reps, opt.exec, [&](std::size_t r) {
    const PotentialSample s = sample_potential(model, r);
    if (tree) {
      for (std::size_t i = 0; i < ne; ++i) {
        const TreeGreen tg(model, s, ComplexEnergy(energies[i], eta), opt.boundary,
                           pools.empty() ? nullptr : &pools[i]);
        const cplx g = tg.G00();
        samples[r * ne + i] =
            averaged ? averaged_spectral_density(law, s.values[o] - 1.0 / g) : g.imag() / std::numbers::pi;
      }
      return;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian(model, s));
    const Eigen::VectorXd& ev = es.eigenvalues();
    const Eigen::VectorXd w = es.eigenvectors().row(static_cast<Eigen::Index>(o)).transpose().array().square();
    for (std::size_t i = 0; i < ne; ++i) {
      const cplx z(energies[i], eta);
      cplx g = 0.0;
      for (Eigen::Index k = 0; k < ev.size(); ++k) g += w(k) / (ev(k) - z);
      samples[r * ne + i] =
          averaged ? averaged_spectral_density(law, s.values[o] - 1.0 / g) : g.imag() / std::numbers::pi;
    }
  });

  std::vector<DosEstimate> out(ne);
  const double bound = law.density_sup();
  std::vector<double> column(reps);
  for (std::size_t i = 0; i < ne; ++i) {
    for (std::size_t r = 0; r < reps; ++r) column[r] = samples[r * ne + i];
    const MeanEstimate m = mean_stderr(column);
    out[i] = {energies[i], eta, m.mean, m.stderr_, bound, m.mean <= bound + 3.0 * m.stderr_};
  }
  return out;
}

DosEstimate dos(const OperatorModel& model, double E, double eta, int replicates, const DosOptions& opt) {
  return dos_scan(model, {E}, eta, replicates, opt).front();
}

std::vector<EnergyClassification> classify_energies(const OperatorModel& model, const std::vector<double>& energies,
                                                    int replicates, const ClassifyOptions& opt) {
  if (replicates < 1) throw std::invalid_argument("classify_energy: replicates must be >= 1");
  const bool tree = model.graph.kind() == GraphKind::tree;
  const auto etas = opt.ladder.values();
  const std::size_t ne = energies.size(), nk = etas.size();
  const auto reps = static_cast<std::size_t>(replicates);
  const double n_sites = static_cast<double>(model.graph.vertex_count());
  const double ac_floor = 10.0 * std::abs(model.hopping) * model.graph.adjacency_norm() / n_sites;

  std::vector<std::vector<BoundaryPool>> pools;
  if (tree && needs_pool(opt.boundary)) {
    pools.assign(ne, std::vector<BoundaryPool>(nk));
    for_each_index(ne * nk, opt.exec, [&](std::size_t j) {
      pools[j / nk][j % nk] = *make_pool(model, ComplexEnergy(energies[j / nk], etas[j % nk]), opt.boundary);
    });
  }

  struct Outcome {
    Verdict verdict = Verdict::inconclusive;
    bool ac = false;
  };
  std::vector<Outcome> outcome(reps * ne);
  for_each_index(reps, opt.exec, [&](std::size_t r) {
    const PotentialSample s = sample_potential(model, r);
    Eigen::MatrixXd h;
    if (!tree) h = hamiltonian(model, s);
    for (std::size_t i = 0; i < ne; ++i) {
      const GammaTrace t = tree ? gamma_tree(model, s, energies[i], opt.ladder, opt.boundary,
                                             pools.empty() ? nullptr : &pools[i])
                                : gamma(h, model.graph.origin(), energies[i], opt.ladder);
      Outcome& o = outcome[r * ne + i];
      o.verdict = divergence_verdict(t, opt.thresholds).verdict;
      const auto& pts = t.points;
      o.ac = pts.size() >= 2 && pts[pts.size() - 1].G.imag() > ac_floor && pts[pts.size() - 2].G.imag() > ac_floor;
    }
  });

  std::vector<EnergyClassification> out(ne);
  for (std::size_t i = 0; i < ne; ++i) {
    std::size_t div = 0, fin = 0, ac = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const Outcome& o = outcome[r * ne + i];
      div += o.verdict == Verdict::diverging;
      fin += o.verdict == Verdict::finite;
      ac += o.ac;
    }
    const double n = static_cast<double>(reps);
    out[i] = {energies[i], div / n, fin / n, static_cast<double>(reps - div - fin) / n, ac / n, replicates};
  }
  return out;
}

EnergyClassification classify_energy(const OperatorModel& model, double E, int replicates, const ClassifyOptions& opt) {
  return classify_energies(model, {E}, replicates, opt).front();
}

std::vector<double> energy_grid(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("energy grid needs count >= 1");
  const double shift = 1e-4 * std::numbers::sqrt2;
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = (count == 1 ? lo : lo + (hi - lo) * i / (count - 1)) + shift;
  return out;
}

}  // namespace resdeloc
