#pragma once

// Independent numeric oracles used by unit and acceptance tests. These must
// not reuse the library's closed-form paths.

#include <cmath>
#include <numbers>

namespace test_oracles {

inline double normal_pdf(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

// -ln of the Bhattacharyya coefficient integral(sqrt(p q)) for two 1-D
// Gaussians, via composite Simpson quadrature.
inline double bhattacharyya_1d_numeric(double mean_a, double sigma_a, double mean_b,
                                       double sigma_b, int intervals = 100000) {
  const double smax = std::max(sigma_a, sigma_b);
  const double lo = std::min(mean_a, mean_b) - 12.0 * smax;
  const double hi = std::max(mean_a, mean_b) + 12.0 * smax;
  const double h = (hi - lo) / intervals;
  auto f = [&](double x) {
    return std::sqrt(normal_pdf(x, mean_a, sigma_a) * normal_pdf(x, mean_b, sigma_b));
  };
  double sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) {
    sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return -std::log(sum * h / 3.0);
}

}  // namespace test_oracles
