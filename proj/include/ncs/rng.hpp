#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

// Counter-based deterministic randomness. Every random quantity in a run is
// derived by hashing (master seed, stream tag, indices...), so results do not
// depend on evaluation order or worker scheduling.

namespace ncs::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t index) {
  return mix(key ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

template <class... Rest>
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t index, Rest... rest) {
  return derive(derive(key, index), rest...);
}

// Named sub-streams so independent decisions never share bits.
enum class Stream : std::uint64_t {
  kInit = 1,       // initial genome coordinates
  kChooseM = 2,    // sub-problem count draw
  kGrouping = 3,   // dimension shuffle
  kOffspring = 4,  // Gaussian perturbations
  kEval = 5,       // objective evaluation seed (stochastic problems)
  kEpisode = 6,    // per-episode environment seed
  kEnvReset = 7,   // initial environment state draw
};

constexpr std::uint64_t derive(std::uint64_t key, Stream s) {
  return derive(key, static_cast<std::uint64_t>(s));
}

template <class... Rest>
constexpr std::uint64_t derive(std::uint64_t key, Stream s, Rest... rest) {
  return derive(derive(key, s), rest...);
}

// Uniform double in [0, 1) from a hashed word.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Order-free draws: the value at (key, index) is independent of any other
// index, so permuting a group of dimensions permutes the draws with it.
constexpr double uniform_at(std::uint64_t key, std::uint64_t index) {
  return to_unit(derive(key, index));
}

inline double normal_at(std::uint64_t key, std::uint64_t index) {
  const double u1 = to_unit(derive(key, 2 * index)) + 0x1.0p-54;  // (0, 1]
  const double u2 = to_unit(derive(key, 2 * index + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Small sequential generator for shuffles and pool draws.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }

  result_type operator()() {
    state_ += kGolden;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform01() { return to_unit((*this)()); }

  // Unbiased draw in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v;
    do {
      v = (*this)();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::uint64_t state_;
};

}  // namespace ncs::rng
