#include "ncs/neuro.hpp"

#include <algorithm>
#include <cmath>

#include "ncs/errors.hpp"

namespace ncs {

void MlpArchitecture::validate() const {
  require(layer_sizes.size() >= 2, "MlpArchitecture: at least input and output layers required");
  for (int n : layer_sizes) require(n >= 1, "MlpArchitecture: layer sizes must be positive");
}

int genome_size(const MlpArchitecture& arch) {
  arch.validate();
  int total = 0;
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
    total += arch.layer_sizes[l] * arch.layer_sizes[l + 1] + arch.layer_sizes[l + 1];
  }
  return total;
}

MlpWeights unflatten(std::span<const double> genome, const MlpArchitecture& arch) {
  require(static_cast<int>(genome.size()) == genome_size(arch),
          "unflatten: genome length does not match architecture");
  MlpWeights w;
  std::size_t pos = 0;
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
    const std::size_t n_in = static_cast<std::size_t>(arch.layer_sizes[l]);
    const std::size_t n_out = static_cast<std::size_t>(arch.layer_sizes[l + 1]);
    w.weights.emplace_back(genome.begin() + pos, genome.begin() + pos + n_in * n_out);
    pos += n_in * n_out;
    w.biases.emplace_back(genome.begin() + pos, genome.begin() + pos + n_out);
    pos += n_out;
  }
  return w;
}

Genome flatten(const MlpWeights& weights) {
  Genome g;
  for (std::size_t l = 0; l < weights.weights.size(); ++l) {
    g.insert(g.end(), weights.weights[l].begin(), weights.weights[l].end());
    g.insert(g.end(), weights.biases[l].begin(), weights.biases[l].end());
  }
  return g;
}

MlpPolicy::MlpPolicy(std::span<const double> genome, const MlpArchitecture& arch)
    : arch_(arch), w_(unflatten(genome, arch)) {
  std::size_t widest = 0;
  for (int n : arch_.layer_sizes) widest = std::max(widest, static_cast<std::size_t>(n));
  buf_a_.resize(widest);
  buf_b_.resize(widest);
}

int MlpPolicy::act(std::span<const double> observation) const {
  require(static_cast<int>(observation.size()) == arch_.input_size(),
          "policy_act: observation length mismatch");
  for (double v : observation) {
    require(std::isfinite(v), "policy_act: non-finite observation");
  }

  std::vector<double>* cur = &buf_a_;
  std::vector<double>* next = &buf_b_;
  std::copy(observation.begin(), observation.end(), cur->begin());
  std::size_t cur_n = observation.size();

  const std::size_t layers = w_.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t n_out = w_.biases[l].size();
    const bool hidden = l + 1 < layers;
    for (std::size_t o = 0; o < n_out; ++o) {
      double acc = w_.biases[l][o];
      const double* row = w_.weights[l].data() + o * cur_n;
      for (std::size_t i = 0; i < cur_n; ++i) acc += row[i] * (*cur)[i];
      (*next)[o] = hidden ? std::tanh(acc) : acc;
    }
    std::swap(cur, next);
    cur_n = n_out;
  }

  int best = 0;
  for (std::size_t o = 1; o < cur_n; ++o) {
    if ((*cur)[o] > (*cur)[best]) best = static_cast<int>(o);
  }
  return best;
}

int policy_act(std::span<const double> genome, const MlpArchitecture& arch,
               std::span<const double> observation) {
  return MlpPolicy(genome, arch).act(observation);
}

}  // namespace ncs
