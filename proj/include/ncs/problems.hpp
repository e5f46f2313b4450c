#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ncs/gaussian.hpp"

namespace ncs {

enum class Sense { kMaximize, kMinimize };

// Black-box objective. evaluate() is the only call that consumes budget; the
// counter is atomic because the optimizer evaluates candidates concurrently.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual int dimension() const = 0;
  virtual Sense sense() const = 0;
  virtual bool stochastic() const { return false; }

  // Empty spans mean "unbounded".
  virtual std::span<const double> lower_bounds() const { return {}; }
  virtual std::span<const double> upper_bounds() const { return {}; }

  // eval_seed drives stochastic objectives (RL episodes); deterministic
  // benchmarks ignore it.
  virtual double evaluate(std::span<const double> x, std::uint64_t eval_seed) {
    count_.fetch_add(1, std::memory_order_relaxed);
    return eval_impl(x, eval_seed);
  }

  virtual std::uint64_t evaluations() const { return count_.load(std::memory_order_relaxed); }

 protected:
  virtual double eval_impl(std::span<const double> x, std::uint64_t eval_seed) = 0;

 private:
  std::atomic<std::uint64_t> count_{0};
};

// Flips a minimization problem into the optimizer's maximization convention.
// Shares the inner problem's evaluation counter.
std::shared_ptr<Problem> negate_wrap(std::shared_ptr<Problem> inner);

// Standard benchmark functions, sense = minimize.
//   sphere, rastrigin: [-5.12, 5.12]^D
//   ackley:            [-32.768, 32.768]^D
//   rosenbrock:        [-5, 10]^D
//   himmelblau:        [-6, 6]^2 (D must be 2)
std::shared_ptr<Problem> benchmark(const std::string& name, int dimension);

// Raw function value without touching any counter (for audits and coverage
// checks outside the budgeted run).
double benchmark_value(const std::string& name, std::span<const double> x);

// The four global minima of Himmelblau's function.
std::vector<Genome> himmelblau_minima();

}  // namespace ncs
