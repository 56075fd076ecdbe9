#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace resdeloc {

using Rng = std::mt19937_64;

/// Independent stream purposes; each gets its own seed_seq key.
enum class StreamTag : std::uint64_t {
  potential = 1,
  calibration = 2,
  boundary_pool = 3,
  boundary_leaf = 4,
  theorem = 5,
  delta = 6,
  pair_statistics = 7,
  phase = 8,
};

/// Seeded generator for (seed, tag, path...). Streams for distinct keys do
/// not share state, so replicates can run on any thread in any order.
Rng make_stream(std::uint64_t seed, StreamTag tag, std::initializer_list<std::uint64_t> path = {});
Rng make_stream(std::uint64_t seed, StreamTag tag, const std::vector<std::uint64_t>& path);

/// Uniform on (0,1) from the top 53 bits; never returns 0 or 1.
double uniform01(Rng& rng);

enum class DistKind { uniform, gaussian, cauchy, bernoulli };

std::string to_string(DistKind kind);

/// Single-site law. Parameters by kind:
///   uniform(a, b), gaussian(mean, sd), cauchy(loc, scale), bernoulli(p, v0, v1)
/// with P(v0) = p for bernoulli. E[V] does not exist for cauchy.
struct Distribution {
  DistKind kind = DistKind::uniform;
  double p1 = 0.0;
  double p2 = 1.0;
  double p3 = 0.0;

  static Distribution uniform(double a, double b);
  static Distribution gaussian(double mean, double sd);
  static Distribution cauchy(double loc, double scale);
  static Distribution bernoulli(double p, double v0, double v1);

  bool has_density() const { return kind != DistKind::bernoulli; }
  double density(double v) const;
  double cdf(double v) const;
  double quantile(double u) const;
  /// ||rho||_inf; throws for bernoulli.
  double density_sup() const;
  /// Law of lambda*V, lambda > 0.
  Distribution scaled(double lambda) const;
  double sample(Rng& rng) const;
  std::string describe() const;
};

struct DensityCondition {
  double c = 0.0;
  bool holds = false;
};

/// Smallest c on a scan grid with rho(v) <= c * inf_{0<eps<=delta} (1_eps * rho)(v),
/// where (1_eps * rho)(v) = (F(v+eps) - F(v-eps)) / (2 eps).
DensityCondition check_density_condition(const Distribution& dist, double delta);

/// Kolmogorov-Smirnov distance between the empirical law of `draws` and dist.
double ks_statistic(std::vector<double> draws, const Distribution& dist);

}  // namespace resdeloc
