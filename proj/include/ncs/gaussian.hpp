#pragma once

#include <span>
#include <vector>

namespace ncs {

// Flat vector of decision variables (policy weights or benchmark variables).
using Genome = std::vector<double>;

// Gaussian search distribution with diagonal covariance diag(sigma^2).
struct DiagGaussian {
  Genome mean;
  std::vector<double> sigma;  // per-dimension standard deviations, > 0
};

// Bhattacharyya distance between two diagonal Gaussians:
//   sum_k (1/8) (mu_a - mu_b)^2 / s_k + (1/2) ln( s_k / (sigma_a sigma_b) )
// with s_k = (sigma_a^2 + sigma_b^2) / 2. Symmetric, zero iff identical.
double bhattacharyya(std::span<const double> mean_a, std::span<const double> sigma_a,
                     std::span<const double> mean_b, std::span<const double> sigma_b);

double bhattacharyya(const DiagGaussian& a, const DiagGaussian& b);

// Nearest-neighbor diversity: min Bhattacharyya distance to any other process.
double diversity(const DiagGaussian& candidate, std::span<const DiagGaussian> others);

}  // namespace ncs
