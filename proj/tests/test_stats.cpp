#include <doctest.h>

#include <cmath>
#include <vector>

#include "resdeloc/stats.hpp"

using namespace resdeloc;

TEST_CASE("mean and stderr") {
  const std::vector<double> xs = {1, 2, 3, 4};
  const auto m = mean_stderr(xs);
  CHECK(m.mean == 2.5);
  CHECK(m.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(m.n == 4);
  const std::vector<double> one = {7};
  CHECK(mean_stderr(one).stderr_ == 0.0);
}

TEST_CASE("linear fit") {
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i);
    y.push_back(3.0 - 0.5 * i);
  }
  const auto f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(-0.5));
  CHECK(f.intercept == doctest::Approx(3.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.slope_stderr < 1e-12);
  const std::vector<double> flat(10, 2.0);
  CHECK(linear_fit(x, flat).r2 == 1.0);

  std::vector<double> noisy = y;
  for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] += (i % 2 ? 0.1 : -0.1);
  const auto g = linear_fit(x, noisy);
  CHECK(g.r2 < 1.0);
  CHECK(g.slope_stderr > 0.0);
}

TEST_CASE("lower quantile") {
  std::vector<double> xs;
  for (int i = 1; i <= 100; ++i) xs.push_back(101 - i);
  const double t = lower_quantile(xs, 0.1);
  int above = 0;
  for (double v : xs) above += v >= t;
  CHECK(above >= 90);
  CHECK(t == 11.0);
  CHECK(lower_quantile({5.0}, 0.3) == 5.0);
}

TEST_CASE("jackknife of the mean is the standard error") {
  std::vector<std::vector<double>> rows;
  std::vector<double> flat;
  for (int i = 0; i < 30; ++i) {
    const double v = std::sin(i * 1.7) + 0.1 * i;
    rows.push_back({v});
    flat.push_back(v);
  }
  const double jk = jackknife_stderr(rows, [](const std::vector<double>& m) { return m[0]; });
  CHECK(jk == doctest::Approx(mean_stderr(flat).stderr_).epsilon(1e-10));
}
