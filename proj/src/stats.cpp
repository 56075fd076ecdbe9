#include "resdeloc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace resdeloc {

MeanEstimate mean_stderr(std::span<const double> xs) {
  MeanEstimate out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  const double n = static_cast<double>(xs.size());
  out.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("linear_fit: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double sse = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
  f.slope_stderr = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return f;
}

double lower_quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("lower_quantile of empty set");
  const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(xs.size())));
  const auto idx = std::min(k, xs.size() - 1);
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(idx), xs.end());
  return xs[idx];
}

}  // namespace resdeloc
