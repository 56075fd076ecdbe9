#include "resdeloc/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace resdeloc {

namespace {

void require_density(const Distribution& d, const char* what) {
  if (!d.has_density())
    throw std::invalid_argument(std::string(what) + ": bernoulli law has no density");
}

}  // namespace

Rng make_stream(std::uint64_t seed, StreamTag tag, const std::vector<std::uint64_t>& path) {
  std::vector<std::uint32_t> words;
  auto push = [&](std::uint64_t w) {
    words.push_back(static_cast<std::uint32_t>(w));
    words.push_back(static_cast<std::uint32_t>(w >> 32));
  };
  push(seed);
  push(static_cast<std::uint64_t>(tag));
  push(path.size());
  for (auto p : path) push(p);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

Rng make_stream(std::uint64_t seed, StreamTag tag, std::initializer_list<std::uint64_t> path) {
  return make_stream(seed, tag, std::vector<std::uint64_t>(path));
}

double uniform01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::string to_string(DistKind kind) {
  switch (kind) {
    case DistKind::uniform: return "uniform";
    case DistKind::gaussian: return "gaussian";
    case DistKind::cauchy: return "cauchy";
    case DistKind::bernoulli: return "bernoulli";
  }
  return "unknown";
}

Distribution Distribution::uniform(double a, double b) {
  if (!(b > a)) throw std::invalid_argument("uniform requires a < b");
  return {DistKind::uniform, a, b, 0.0};
}

Distribution Distribution::gaussian(double mean, double sd) {
  if (!(sd > 0)) throw std::invalid_argument("gaussian requires sd > 0");
  return {DistKind::gaussian, mean, sd, 0.0};
}

Distribution Distribution::cauchy(double loc, double scale) {
  if (!(scale > 0)) throw std::invalid_argument("cauchy requires scale > 0");
  return {DistKind::cauchy, loc, scale, 0.0};
}

Distribution Distribution::bernoulli(double p, double v0, double v1) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("bernoulli requires p in [0,1]");
  return {DistKind::bernoulli, p, v0, v1};
}

double Distribution::density(double v) const {
  require_density(*this, "density");
  switch (kind) {
    case DistKind::uniform: return (v >= p1 && v <= p2) ? 1.0 / (p2 - p1) : 0.0;
    case DistKind::gaussian: {
      const double t = (v - p1) / p2;
      return std::exp(-0.5 * t * t) / (p2 * std::sqrt(2.0 * std::numbers::pi));
    }
    case DistKind::cauchy: {
      const double t = (v - p1) / p2;
      return 1.0 / (std::numbers::pi * p2 * (1.0 + t * t));
    }
    default: break;
  }
  return 0.0;
}

double Distribution::cdf(double v) const {
  switch (kind) {
    case DistKind::uniform: return std::clamp((v - p1) / (p2 - p1), 0.0, 1.0);
    case DistKind::gaussian: return 0.5 * std::erfc(-(v - p1) / (p2 * std::numbers::sqrt2));
    case DistKind::cauchy: return 0.5 + std::atan((v - p1) / p2) / std::numbers::pi;
    case DistKind::bernoulli: {
      const double lo = std::min(p2, p3), hi = std::max(p2, p3);
      const double p_lo = p2 <= p3 ? p1 : 1.0 - p1;
      if (p2 == p3) return v >= p2 ? 1.0 : 0.0;
      if (v < lo) return 0.0;
      return v < hi ? p_lo : 1.0;
    }
  }
  return 0.0;
}

double Distribution::quantile(double u) const {
  if (!(u > 0 && u < 1)) throw std::invalid_argument("quantile requires u in (0,1)");
  switch (kind) {
    case DistKind::uniform: return p1 + (p2 - p1) * u;
    case DistKind::cauchy: return p1 + p2 * std::tan(std::numbers::pi * (u - 0.5));
    case DistKind::gaussian: {
      double lo = p1 - 40 * p2, hi = p1 + 40 * p2;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < u ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    case DistKind::bernoulli: {
      const double lo = std::min(p2, p3), hi = std::max(p2, p3);
      const double p_lo = p2 <= p3 ? p1 : 1.0 - p1;
      return u <= p_lo ? lo : hi;
    }
  }
  return 0.0;
}

double Distribution::density_sup() const {
  require_density(*this, "density_sup");
  switch (kind) {
    case DistKind::uniform: return 1.0 / (p2 - p1);
    case DistKind::gaussian: return 1.0 / (p2 * std::sqrt(2.0 * std::numbers::pi));
    case DistKind::cauchy: return 1.0 / (std::numbers::pi * p2);
    default: break;
  }
  return std::numeric_limits<double>::infinity();
}

Distribution Distribution::scaled(double lambda) const {
  if (!(lambda > 0)) throw std::invalid_argument("scaled requires lambda > 0");
  switch (kind) {
    case DistKind::uniform: return uniform(lambda * p1, lambda * p2);
    case DistKind::gaussian: return gaussian(lambda * p1, lambda * p2);
    case DistKind::cauchy: return cauchy(lambda * p1, lambda * p2);
    case DistKind::bernoulli: return bernoulli(p1, lambda * p2, lambda * p3);
  }
  return *this;
}

double Distribution::sample(Rng& rng) const {
  switch (kind) {
    case DistKind::uniform: return p1 + (p2 - p1) * uniform01(rng);
    case DistKind::gaussian: {
      const double u1 = uniform01(rng), u2 = uniform01(rng);
      return p1 + p2 * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    case DistKind::cauchy: return p1 + p2 * std::tan(std::numbers::pi * (uniform01(rng) - 0.5));
    case DistKind::bernoulli: return uniform01(rng) < p1 ? p2 : p3;
  }
  return 0.0;
}

std::string Distribution::describe() const {
  switch (kind) {
    case DistKind::uniform: return "uniform(" + std::to_string(p1) + "," + std::to_string(p2) + ")";
    case DistKind::gaussian: return "gaussian(" + std::to_string(p1) + "," + std::to_string(p2) + ")";
    case DistKind::cauchy: return "cauchy(" + std::to_string(p1) + "," + std::to_string(p2) + ")";
    case DistKind::bernoulli:
      return "bernoulli(" + std::to_string(p1) + ";" + std::to_string(p2) + "," + std::to_string(p3) + ")";
  }
  return "unknown";
}

DensityCondition check_density_condition(const Distribution& dist, double delta) {
  require_density(dist, "check_density_condition");
  if (!(delta > 0)) throw std::invalid_argument("check_density_condition requires delta > 0");
  constexpr int grid = 10000;
  constexpr int eps_grid = 64;
  const double lo = dist.quantile(1e-6), hi = dist.quantile(1.0 - 1e-6);
  // Uniform in v and uniform in probability, so heavy tails do not starve the bulk.
  std::vector<double> points;
  points.reserve(2 * grid);
  for (int i = 0; i < grid; ++i) {
    points.push_back(lo + (hi - lo) * i / (grid - 1));
    points.push_back(dist.quantile(1e-6 + (1.0 - 2e-6) * i / (grid - 1)));
  }
  double c = 0.0;
  for (double v : points) {
    const double rho = dist.density(v);
    if (rho == 0.0) continue;
    double smoothed = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= eps_grid; ++k) {
      const double eps = delta * k / eps_grid;
      smoothed = std::min(smoothed, (dist.cdf(v + eps) - dist.cdf(v - eps)) / (2.0 * eps));
    }
    if (smoothed <= 0.0) return {std::numeric_limits<double>::infinity(), false};
    c = std::max(c, rho / smoothed);
  }
  return {c, std::isfinite(c)};
}

double ks_statistic(std::vector<double> draws, const Distribution& dist) {
  if (draws.empty()) throw std::invalid_argument("ks_statistic needs draws");
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = dist.cdf(draws[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

}  // namespace resdeloc
