#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace resdeloc {

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

/// Sample mean with standard error sd/sqrt(n) (0 for n < 2).
MeanEstimate mean_stderr(std::span<const double> xs);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. R^2 is 1 for an exact
/// (including constant) fit.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Value t with #{v >= t} >= (1 - q) n: the floor(q n)-th order statistic.
double lower_quantile(std::vector<double> xs, double q);

/// Delete-one jackknife standard error of a statistic of the per-block
/// rows. stat receives the mean of all rows except one.
template <class Stat>
double jackknife_stderr(const std::vector<std::vector<double>>& rows, Stat&& stat) {
  const std::size_t n = rows.size();
  if (n < 2) return 0.0;
  const std::size_t m = rows.front().size();
  std::vector<double> total(m, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < m; ++j) total[j] += r[j];
  std::vector<double> values(n);
  std::vector<double> loo(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) loo[j] = (total[j] - rows[i][j]) / static_cast<double>(n - 1);
    values[i] = stat(loo);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace resdeloc
