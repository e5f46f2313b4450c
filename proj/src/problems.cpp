#include "ncs/problems.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

#include "ncs/errors.hpp"

namespace ncs {
namespace {

double sphere_fn(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double rastrigin_fn(std::span<const double> x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  return s;
}

double ackley_fn(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double sq = 0.0;
  double cs = 0.0;
  for (double v : x) {
    sq += v * v;
    cs += std::cos(2.0 * std::numbers::pi * v);
  }
  return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::numbers::e;
}

double rosenbrock_fn(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    s += 100.0 * a * a + b * b;
  }
  return s;
}

double himmelblau_fn(std::span<const double> x) {
  const double a = x[0] * x[0] + x[1] - 11.0;
  const double b = x[0] + x[1] * x[1] - 7.0;
  return a * a + b * b;
}

class BenchmarkProblem final : public Problem {
 public:
  BenchmarkProblem(std::function<double(std::span<const double>)> fn, int dim, double lo, double hi)
      : fn_(std::move(fn)), dim_(dim), lower_(dim, lo), upper_(dim, hi) {}

  int dimension() const override { return dim_; }
  Sense sense() const override { return Sense::kMinimize; }
  std::span<const double> lower_bounds() const override { return lower_; }
  std::span<const double> upper_bounds() const override { return upper_; }

 protected:
  double eval_impl(std::span<const double> x, std::uint64_t) override {
    require(static_cast<int>(x.size()) == dim_, "benchmark: genome dimension mismatch");
    return fn_(x);
  }

 private:
  std::function<double(std::span<const double>)> fn_;
  int dim_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

class NegatedProblem final : public Problem {
 public:
  explicit NegatedProblem(std::shared_ptr<Problem> inner) : inner_(std::move(inner)) {}

  int dimension() const override { return inner_->dimension(); }
  Sense sense() const override { return Sense::kMaximize; }
  bool stochastic() const override { return inner_->stochastic(); }
  std::span<const double> lower_bounds() const override { return inner_->lower_bounds(); }
  std::span<const double> upper_bounds() const override { return inner_->upper_bounds(); }

  double evaluate(std::span<const double> x, std::uint64_t eval_seed) override {
    return -inner_->evaluate(x, eval_seed);
  }

  std::uint64_t evaluations() const override { return inner_->evaluations(); }

 protected:
  double eval_impl(std::span<const double>, std::uint64_t) override { return 0.0; }  // unused

 private:
  std::shared_ptr<Problem> inner_;
};

}  // namespace

std::shared_ptr<Problem> negate_wrap(std::shared_ptr<Problem> inner) {
  require(inner != nullptr, "negate_wrap: null problem");
  require(inner->sense() == Sense::kMinimize, "negate_wrap: problem already maximizing");
  return std::make_shared<NegatedProblem>(std::move(inner));
}

double benchmark_value(const std::string& name, std::span<const double> x) {
  if (name == "sphere") return sphere_fn(x);
  if (name == "rastrigin") return rastrigin_fn(x);
  if (name == "ackley") return ackley_fn(x);
  if (name == "rosenbrock") return rosenbrock_fn(x);
  if (name == "himmelblau") {
    require(x.size() == 2, "himmelblau is 2-D only");
    return himmelblau_fn(x);
  }
  throw ConfigError("unknown benchmark function: " + name);
}

std::shared_ptr<Problem> benchmark(const std::string& name, int dimension) {
  if (dimension < 1) throw ConfigError("benchmark dimension must be positive");
  if (name == "sphere")
    return std::make_shared<BenchmarkProblem>(sphere_fn, dimension, -5.12, 5.12);
  if (name == "rastrigin")
    return std::make_shared<BenchmarkProblem>(rastrigin_fn, dimension, -5.12, 5.12);
  if (name == "ackley")
    return std::make_shared<BenchmarkProblem>(ackley_fn, dimension, -32.768, 32.768);
  if (name == "rosenbrock")
    return std::make_shared<BenchmarkProblem>(rosenbrock_fn, dimension, -5.0, 10.0);
  if (name == "himmelblau") {
    if (dimension != 2) throw ConfigError("himmelblau requires dimension 2");
    return std::make_shared<BenchmarkProblem>(himmelblau_fn, 2, -6.0, 6.0);
  }
  throw ConfigError("unknown benchmark function: " + name);
}

std::vector<Genome> himmelblau_minima() {
  return {
      {3.0, 2.0},
      {-2.805118, 3.131312},
      {-3.779310, -3.283186},
      {3.584428, -1.848126},
  };
}

}  // namespace ncs
