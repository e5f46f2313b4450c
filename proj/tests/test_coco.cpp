#include <doctest.h>

#include <map>
#include <set>
#include <vector>

#include "ncs/coco.hpp"
#include "ncs/errors.hpp"
#include "ncs/problems.hpp"
#include "ncs/rng.hpp"

using namespace ncs;

TEST_CASE("random_grouping invariants over many draws") {
  ncs::rng::SplitMix64 gen(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 1 + static_cast<int>(gen.below(60));
    const int m = 1 + static_cast<int>(gen.below(static_cast<std::uint64_t>(dim)));
    ncs::rng::SplitMix64 stream(gen());
    const GroupingPlan plan = random_grouping(dim, m, stream);
    CHECK(static_cast<int>(plan.groups.size()) == m);
    plan.validate(dim);  // disjoint, non-empty, balanced, full cover
  }
  ncs::rng::SplitMix64 stream(3);
  CHECK_THROWS_AS(random_grouping(3, 4, stream), ContractError);
}

TEST_CASE("random_grouping shapes match the balance rule") {
  ncs::rng::SplitMix64 stream(11);
  const GroupingPlan six_three = random_grouping(6, 3, stream);
  for (const auto& g : six_three.groups) CHECK(g.size() == 2);

  const GroupingPlan five_two = random_grouping(5, 2, stream);
  std::multiset<std::size_t> sizes{five_two.groups[0].size(), five_two.groups[1].size()};
  CHECK(sizes == std::multiset<std::size_t>{2, 3});

  const GroupingPlan whole = random_grouping(7, 1, stream);
  CHECK(whole.groups.size() == 1);
  CHECK(whole.groups[0] == std::vector<int>{0, 1, 2, 3, 4, 5, 6});
}

TEST_CASE("choose_m draws uniformly from the pool") {
  const std::vector<int> pool{2, 3, 4};
  ncs::rng::SplitMix64 stream(5);
  std::map<int, int> counts;
  const int draws = 6000;
  for (int i = 0; i < draws; ++i) counts[choose_m(pool, stream)]++;
  for (int m : pool) {
    CHECK(counts[m] > draws / 3 - 300);
    CHECK(counts[m] < draws / 3 + 300);
  }

  const std::vector<int> singleton{1};
  for (int i = 0; i < 10; ++i) CHECK(choose_m(singleton, stream) == 1);
}

TEST_CASE("extract and complement") {
  const Genome full{10.0, 11.0, 12.0, 13.0};

  SUBCASE("gather definition") {
    const PartialSolution p = extract_partial(full, {0, 2});
    CHECK(p.values == std::vector<double>{10.0, 12.0});
  }
  SUBCASE("identity gather") {
    const PartialSolution p = extract_partial(full, {0, 1, 2, 3});
    CHECK(p.values == full);
  }
  SUBCASE("scatter definition") {
    const PartialSolution p{{-1.0, -2.0}, {0, 2}};
    CHECK(complement_individual(p, full) == Genome{-1.0, 11.0, -2.0, 13.0});
  }
  SUBCASE("whole-genome group replaces everything") {
    const PartialSolution p{{1.0, 2.0, 3.0, 4.0}, {0, 1, 2, 3}};
    CHECK(complement_individual(p, full) == Genome{1.0, 2.0, 3.0, 4.0});
  }
  SUBCASE("out-of-range index is a contract violation") {
    CHECK_THROWS_AS(extract_partial(full, {0, 4}), ContractError);
    const PartialSolution p{{-1.0}, {9}};
    CHECK_THROWS_AS(complement_individual(p, full), ContractError);
  }
}

TEST_CASE("extract/complement roundtrip identity") {
  ncs::rng::SplitMix64 gen(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + static_cast<int>(gen.below(20));
    Genome g;
    for (int k = 0; k < dim; ++k) g.push_back(-5.0 + 10.0 * gen.uniform01());
    const int m = 1 + static_cast<int>(gen.below(static_cast<std::uint64_t>(dim)));
    ncs::rng::SplitMix64 stream(gen());
    const GroupingPlan plan = random_grouping(dim, m, stream);
    for (const auto& group : plan.groups) {
      CHECK(complement_individual(extract_partial(g, group), g) == g);
    }
  }
}

TEST_CASE("complement_shared differs from the own context only at group coordinates") {
  const Genome shared{0.0, 0.0, 0.0, 0.0};
  const PartialSolution p1{{1.0, 1.0}, {1, 3}};
  const PartialSolution p2{{2.0, 2.0}, {1, 3}};
  const Genome c1 = complement_shared(p1, shared);
  const Genome c2 = complement_shared(p2, shared);
  CHECK(c1[0] == c2[0]);
  CHECK(c1[2] == c2[2]);
  CHECK(c1[1] != c2[1]);

  const Genome own{5.0, 6.0, 7.0, 8.0};
  CHECK(complement_shared(p1, own) == complement_individual(p1, own));
}

namespace {

Population seeded_population(Problem& problem, int lambda, std::uint64_t seed) {
  std::vector<SearchProcess> procs(lambda);
  ncs::rng::SplitMix64 gen(seed);
  const int dim = problem.dimension();
  for (auto& p : procs) {
    for (int k = 0; k < dim; ++k) {
      p.dist.mean.push_back(-2.0 + 4.0 * gen.uniform01());
      p.dist.sigma.push_back(0.2);
    }
  }
  Population pop(std::move(procs));
  for (auto& p : pop.processes) {
    p.cached_fitness = problem.evaluate(p.dist.mean, 0);
    if (p.cached_fitness > pop.best_ever.score) {
      pop.best_ever.score = p.cached_fitness;
      pop.best_ever.genome = p.dist.mean;
    }
  }
  return pop;
}

}  // namespace

TEST_CASE("ccncs_iteration consumes lambda*M evaluations and keeps caches fresh") {
  auto problem = negate_wrap(benchmark("sphere", 12));
  Population pop = seeded_population(*problem, 6, 2);
  const std::uint64_t base = problem->evaluations();

  CcSettings settings;
  settings.m_pool = {3};
  std::uint64_t used = 0;
  for (std::uint64_t t = 1; t <= 30; ++t) {
    const IterationOutcome out = ccncs_iteration(pop, *problem, settings, 99, t, 1'000'000);
    CHECK(out.m == 3);
    CHECK(out.evaluations == 18);
    CHECK_FALSE(out.truncated);
    used += out.evaluations;
    // Cached fitness must equal a fresh evaluation of the full genome.
    for (const auto& p : pop.processes) {
      CHECK(p.cached_fitness == -benchmark_value("sphere", p.dist.mean));
    }
  }
  CHECK(problem->evaluations() == base + used);
}

TEST_CASE("shared-complement iterations cost 2*lambda*M evaluations") {
  auto problem = negate_wrap(benchmark("sphere", 8));
  Population pop = seeded_population(*problem, 4, 6);
  const std::uint64_t base = problem->evaluations();

  CcSettings settings;
  settings.m_pool = {2};
  settings.complement = ComplementMode::kSharedBest;
  const IterationOutcome out = ccncs_iteration(pop, *problem, settings, 31, 1, 1'000'000);
  CHECK(out.evaluations == 2 * 4 * 2);
  CHECK(problem->evaluations() == base + out.evaluations);
}

TEST_CASE("subspace steps only touch the active group's coordinates") {
  auto problem = negate_wrap(benchmark("rastrigin", 10));
  Population pop = seeded_population(*problem, 4, 8);

  const std::vector<int> group{1, 4, 7};
  std::vector<Genome> before;
  for (const auto& p : pop.processes) before.push_back(p.dist.mean);

  StepSettings settings;
  ncs_subspace_step(pop, *problem, group, settings, 13, 1, 0);

  for (std::size_t i = 0; i < pop.size(); ++i) {
    for (int k = 0; k < 10; ++k) {
      const bool in_group = k == 1 || k == 4 || k == 7;
      if (!in_group) CHECK(pop.processes[i].dist.mean[k] == before[i][k]);
    }
  }
}

TEST_CASE("run_optimizer respects the budget and is deterministic") {
  OptimizerSettings settings;
  settings.algorithm = Algorithm::kCcncs;
  settings.lambda = 6;
  settings.m_pool = {2, 3, 4};
  settings.budget_evals = 700;
  settings.master_seed = 17;

  auto run_once = [&] {
    auto problem = negate_wrap(benchmark("rastrigin", 10));
    RunLog log = run_optimizer(*problem, settings);
    CHECK(log.total_evaluations == problem->evaluations());
    CHECK(log.total_evaluations <= settings.budget_evals);
    return log;
  };
  const RunLog a = run_once();
  const RunLog b = run_once();
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].best_score == b.rows[i].best_score);
    CHECK(a.rows[i].evaluations_used == b.rows[i].evaluations_used);
  }
  CHECK(a.best_ever.genome == b.best_ever.genome);

  settings.master_seed = 18;
  auto problem = negate_wrap(benchmark("rastrigin", 10));
  const RunLog c = run_optimizer(*problem, settings);
  CHECK(c.best_ever.score != a.best_ever.score);
}

TEST_CASE("degenerate budget runs initialization only") {
  OptimizerSettings settings;
  settings.algorithm = Algorithm::kNcs;
  settings.lambda = 4;
  settings.budget_evals = 4;
  settings.master_seed = 3;

  auto problem = negate_wrap(benchmark("sphere", 5));
  const RunLog log = run_optimizer(*problem, settings);
  CHECK(log.rows.empty());
  CHECK(log.total_evaluations == 4);
  CHECK(log.best_ever.score == log.final_population_best_score);
}

TEST_CASE("m_pool = {1} reproduces the flat NCS trajectory exactly") {
  OptimizerSettings ncs_settings;
  ncs_settings.algorithm = Algorithm::kNcs;
  ncs_settings.lambda = 5;
  ncs_settings.budget_evals = 5 + 5 * 60;
  ncs_settings.master_seed = 29;

  OptimizerSettings cc_settings = ncs_settings;
  cc_settings.algorithm = Algorithm::kCcncs;
  cc_settings.m_pool = {1};

  auto p1 = negate_wrap(benchmark("rastrigin", 8));
  auto p2 = negate_wrap(benchmark("rastrigin", 8));
  const RunLog flat = run_optimizer(*p1, ncs_settings);
  const RunLog decomposed = run_optimizer(*p2, cc_settings);

  REQUIRE(flat.rows.size() == decomposed.rows.size());
  for (std::size_t i = 0; i < flat.rows.size(); ++i) {
    CHECK(flat.rows[i].best_score == decomposed.rows[i].best_score);
    CHECK(flat.rows[i].fitness == decomposed.rows[i].fitness);
    CHECK(flat.rows[i].evaluations_used == decomposed.rows[i].evaluations_used);
  }
  CHECK(flat.best_ever.genome == decomposed.best_ever.genome);
}

TEST_CASE("best-ever score is monotone across a run") {
  OptimizerSettings settings;
  settings.algorithm = Algorithm::kCcncs;
  settings.lambda = 4;
  settings.m_pool = {2, 3};
  settings.budget_evals = 2000;
  settings.master_seed = 55;

  auto problem = negate_wrap(benchmark("ackley", 6));
  const RunLog log = run_optimizer(*problem, settings);
  for (std::size_t i = 1; i < log.rows.size(); ++i) {
    CHECK(log.rows[i].best_score >= log.rows[i - 1].best_score);
    CHECK(log.rows[i].evaluations_used > log.rows[i - 1].evaluations_used);
  }
}
