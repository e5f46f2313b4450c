#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <vector>

#include "ncs/problems.hpp"
#include "ncs/rng.hpp"
#include "ncs/search_core.hpp"

using namespace ncs;

namespace {

// Test-only deterministic problem with an always-NaN twin for rejection paths.
class NanProblem final : public Problem {
 public:
  explicit NanProblem(int dim) : dim_(dim) {}
  int dimension() const override { return dim_; }
  Sense sense() const override { return Sense::kMaximize; }

 protected:
  double eval_impl(std::span<const double>, std::uint64_t) override {
    return std::numeric_limits<double>::quiet_NaN();
  }

 private:
  int dim_;
};

Population make_population(int lambda, int dim, double sigma, std::uint64_t seed) {
  std::vector<SearchProcess> procs(lambda);
  ncs::rng::SplitMix64 gen(seed);
  for (auto& p : procs) {
    for (int k = 0; k < dim; ++k) {
      p.dist.mean.push_back(-2.0 + 4.0 * gen.uniform01());
      p.dist.sigma.push_back(sigma);
    }
  }
  return Population(std::move(procs));
}

}  // namespace

TEST_CASE("perturb applies mean + sigma*z and clips into bounds") {
  CHECK(perturb(std::vector{0.0, 0.0}, std::vector{0.2, 0.2}, std::vector{0.0, 0.0}, {}, {}) ==
        Genome{0.0, 0.0});
  CHECK(perturb(std::vector{1.0, 1.0}, std::vector{0.2, 0.2}, std::vector{1.0, -1.0}, {}, {}) ==
        Genome{1.2, 0.8});
  CHECK(perturb(std::vector{0.0}, std::vector{0.2}, std::vector{5.0}, std::vector{-0.1},
                std::vector{0.1}) == Genome{0.1});
}

TEST_CASE("sample_offspring reuses the parent sigma and respects bounds") {
  SearchProcess p;
  p.dist.mean = {0.0, 0.0, 0.0};
  p.dist.sigma = {0.1, 0.1, 0.1};
  const std::vector<double> lo(3, -0.05);
  const std::vector<double> hi(3, 0.05);
  for (std::uint64_t key = 0; key < 50; ++key) {
    const Genome off = sample_offspring(p, key, lo, hi);
    for (double v : off) {
      CHECK(v >= -0.05);
      CHECK(v <= 0.05);
    }
  }
  // Deterministic in the key.
  CHECK(sample_offspring(p, 7, {}, {}) == sample_offspring(p, 7, {}, {}));
}

TEST_CASE("combined_score and select follow the phi trade-off rule") {
  CHECK(combined_score(1.0, 0.5, 0.0) == 1.0);
  CHECK(combined_score(0.8, 1.0, 1.0) == doctest::Approx(1.8));
  CHECK(combined_score(0.0, 0.5, 2.0) == doctest::Approx(1.0));

  CHECK(select(1.0, 0.5, 0.8, 1.0, 1.0) == Choice::kOffspring);  // 1.8 > 1.5
  CHECK(select(1.0, 0.5, 1.0, 0.5, 1.0) == Choice::kParent);     // tie keeps parent
  CHECK(select(1.0, 0.5, 0.8, 1.0, 0.0) == Choice::kParent);     // pure exploitation
}

TEST_CASE("select is invariant under a common positive affine transform") {
  ncs::rng::SplitMix64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double pf = -3.0 + 6.0 * gen.uniform01();
    const double pd = 2.0 * gen.uniform01();
    const double of = -3.0 + 6.0 * gen.uniform01();
    const double od = 2.0 * gen.uniform01();
    const double phi = 2.0 * gen.uniform01();
    const double a = 0.1 + 4.0 * gen.uniform01();
    const double b = -5.0 + 10.0 * gen.uniform01();
    // Scaling fitness and diversity by a and shifting fitness by b applies
    // the affine map a*s + b to both combined scores.
    CHECK(select(pf, pd, of, od, phi) == select(a * pf + b, a * pd, a * of + b, a * od, phi));
  }
}

TEST_CASE("normalize_scores min-max scales each sequence independently") {
  const std::vector<double> f{0.0, 5.0, 10.0};
  const std::vector<double> d{3.0, 3.0, 3.0};
  const auto [nf, nd] = normalize_scores(f, d);
  CHECK(nf == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(nd == std::vector<double>{0.0, 0.0, 0.0});

  const auto [single, _] = normalize_scores(std::vector{7.0}, std::vector{1.0});
  CHECK(single == std::vector<double>{0.0});
}

TEST_CASE("update_sigma implements the 1/5 success rule") {
  const OneFifthRule rule;  // r = 0.99, epoch = 10

  auto run_epoch = [&rule](int successes) {
    SearchProcess p;
    p.dist.mean = {0.0};
    p.dist.sigma = {0.2};
    for (int t = 0; t < rule.epoch; ++t) update_sigma(p, t < successes, rule);
    return p;
  };

  SUBCASE("ratio above 0.2 expands") {
    const SearchProcess p = run_epoch(4);
    CHECK(p.dist.sigma[0] == doctest::Approx(0.2 / 0.99).epsilon(1e-12));
    CHECK(p.trial_count == 0);
    CHECK(p.success_count == 0);
  }
  SUBCASE("ratio exactly 0.2 leaves sigma unchanged") {
    CHECK(run_epoch(2).dist.sigma[0] == 0.2);
  }
  SUBCASE("ratio below 0.2 contracts") {
    CHECK(run_epoch(0).dist.sigma[0] == doctest::Approx(0.2 * 0.99).epsilon(1e-12));
  }
  SUBCASE("sigma never drops below the floor") {
    SearchProcess p;
    p.dist.mean = {0.0};
    p.dist.sigma = {2e-8};
    for (int e = 0; e < 500; ++e) {
      for (int t = 0; t < rule.epoch; ++t) update_sigma(p, false, rule);
    }
    CHECK(p.dist.sigma[0] >= rule.sigma_floor);
  }
}

TEST_CASE("ncs_step consumes exactly lambda evaluations and tracks best-ever") {
  auto problem = negate_wrap(benchmark("sphere", 3));
  Population pop = make_population(6, 3, 0.2, 1);

  // Seed cached fitness as the driver would.
  for (auto& p : pop.processes) {
    p.cached_fitness = problem->evaluate(p.dist.mean, 0);
    if (p.cached_fitness > pop.best_ever.score) {
      pop.best_ever.score = p.cached_fitness;
      pop.best_ever.genome = p.dist.mean;
    }
  }
  const std::uint64_t base = problem->evaluations();
  CHECK(base == 6);

  StepSettings settings;
  double prev_best = pop.best_ever.score;
  for (std::uint64_t t = 1; t <= 20; ++t) {
    const StepOutcome out = ncs_step(pop, *problem, settings, 123, t);
    CHECK(out.evaluations == 6);
    CHECK(pop.best_ever.score >= prev_best);
    prev_best = pop.best_ever.score;
  }
  CHECK(problem->evaluations() == base + 20 * 6);
}

TEST_CASE("non-finite offspring are rejected without touching means") {
  NanProblem problem(2);
  Population pop = make_population(4, 2, 0.2, 3);
  for (auto& p : pop.processes) p.cached_fitness = 0.0;

  const std::vector<Genome> means_before = [&] {
    std::vector<Genome> m;
    for (const auto& p : pop.processes) m.push_back(p.dist.mean);
    return m;
  }();

  StepSettings settings;
  const StepOutcome out = ncs_step(pop, problem, settings, 11, 1);
  CHECK(out.rejected_non_finite == 4);
  CHECK(out.accepted == 0);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    CHECK(pop.processes[i].dist.mean == means_before[i]);
    CHECK(pop.processes[i].cached_fitness == 0.0);
    CHECK(pop.processes[i].trial_count == 1);
  }
}

TEST_CASE("phi=0 without normalization degenerates to (1+1) hill climbers") {
  auto problem = negate_wrap(benchmark("rastrigin", 4));
  Population pop = make_population(5, 4, 0.2, 9);
  for (auto& p : pop.processes) p.cached_fitness = problem->evaluate(p.dist.mean, 0);

  StepSettings settings;
  settings.phi = 0.0;
  settings.normalize = false;

  std::vector<double> prev_fitness;
  for (const auto& p : pop.processes) prev_fitness.push_back(p.cached_fitness);
  std::vector<Genome> prev_means;
  for (const auto& p : pop.processes) prev_means.push_back(p.dist.mean);

  for (std::uint64_t t = 1; t <= 50; ++t) {
    ncs_step(pop, *problem, settings, 77, t);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const bool moved = pop.processes[i].dist.mean != prev_means[i];
      if (moved) {
        CHECK(pop.processes[i].cached_fitness > prev_fitness[i]);
      } else {
        CHECK(pop.processes[i].cached_fitness == prev_fitness[i]);
      }
      prev_fitness[i] = pop.processes[i].cached_fitness;
      prev_means[i] = pop.processes[i].dist.mean;
    }
  }
}

TEST_CASE("evaluate_batch is worker-count independent") {
  auto problem = negate_wrap(benchmark("ackley", 5));
  std::vector<Genome> candidates;
  std::vector<std::uint64_t> seeds;
  ncs::rng::SplitMix64 gen(17);
  for (int i = 0; i < 16; ++i) {
    Genome g;
    for (int k = 0; k < 5; ++k) g.push_back(-3.0 + 6.0 * gen.uniform01());
    candidates.push_back(std::move(g));
    seeds.push_back(i);
  }
  const auto serial = evaluate_batch(*problem, candidates, seeds, 1);
  const auto parallel = evaluate_batch(*problem, candidates, seeds, 8);
  CHECK(serial == parallel);
}
