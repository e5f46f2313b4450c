#pragma once

#include <span>
#include <vector>

#include "ncs/gaussian.hpp"

namespace ncs {

// Feed-forward policy: tanh hidden layers, linear output, argmax action.
struct MlpArchitecture {
  std::vector<int> layer_sizes;  // input, hidden..., output

  void validate() const;
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
};

// Total weight count: sum over consecutive layers of n_in*n_out + n_out.
int genome_size(const MlpArchitecture& arch);

// Per-layer row-major weight matrices and bias vectors.
struct MlpWeights {
  std::vector<std::vector<double>> weights;  // [layer][out * n_in + in]
  std::vector<std::vector<double>> biases;   // [layer][out]
};

// Layout: layer by layer, weights (row-major) before biases.
MlpWeights unflatten(std::span<const double> genome, const MlpArchitecture& arch);
Genome flatten(const MlpWeights& weights);

// Reusable forward-pass policy; unflattens once, then acts repeatedly.
class MlpPolicy {
 public:
  MlpPolicy(std::span<const double> genome, const MlpArchitecture& arch);

  // Argmax of the output layer; ties broken by lowest index.
  int act(std::span<const double> observation) const;

 private:
  MlpArchitecture arch_;
  MlpWeights w_;
  mutable std::vector<double> buf_a_;
  mutable std::vector<double> buf_b_;
};

int policy_act(std::span<const double> genome, const MlpArchitecture& arch,
               std::span<const double> observation);

}  // namespace ncs
