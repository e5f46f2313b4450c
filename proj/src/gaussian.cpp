#include "ncs/gaussian.hpp"

#include <cmath>
#include <limits>

#include "ncs/errors.hpp"

namespace ncs {

double bhattacharyya(std::span<const double> mean_a, std::span<const double> sigma_a,
                     std::span<const double> mean_b, std::span<const double> sigma_b) {
  require(mean_a.size() == mean_b.size() && sigma_a.size() == sigma_b.size() &&
              mean_a.size() == sigma_a.size(),
          "bhattacharyya: dimension mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < mean_a.size(); ++k) {
    const double va = sigma_a[k] * sigma_a[k];
    const double vb = sigma_b[k] * sigma_b[k];
    const double s = 0.5 * (va + vb);
    const double dm = mean_a[k] - mean_b[k];
    sum += 0.125 * dm * dm / s + 0.5 * std::log(s / std::sqrt(va * vb));
  }
  return sum;
}

double bhattacharyya(const DiagGaussian& a, const DiagGaussian& b) {
  return bhattacharyya(a.mean, a.sigma, b.mean, b.sigma);
}

double diversity(const DiagGaussian& candidate, std::span<const DiagGaussian> others) {
  require(!others.empty(), "diversity: empty set of other distributions");
  double best = std::numeric_limits<double>::infinity();
  for (const DiagGaussian& other : others) {
    best = std::min(best, bhattacharyya(candidate, other));
  }
  return best;
}

}  // namespace ncs
