#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ncs/rng.hpp"
#include "ncs/search_core.hpp"

namespace ncs {

// Partition of dimension indices {0..D-1} into disjoint groups. Groups are
// stored sorted ascending so subspace arithmetic is independent of shuffle
// order; with M=1 the single group is exactly 0..D-1 and the decomposed step
// reduces bit-exactly to the flat NCS step.
struct GroupingPlan {
  std::vector<std::vector<int>> groups;

  int dimension() const;
  void validate(int expected_dimension) const;
};

struct PartialSolution {
  std::vector<double> values;
  std::vector<int> group;
};

// Uniform draw from the configured pool of sub-problem counts.
int choose_m(std::span<const int> pool, rng::SplitMix64& stream);

// Shuffle 0..D-1, slice into M balanced chunks (sizes differ by at most 1),
// sort each chunk.
GroupingPlan random_grouping(int dimension, int m, rng::SplitMix64& stream);

PartialSolution extract_partial(const Genome& full, std::vector<int> group);

// Scatter the partial back into the individual's own full solution; the
// complementary vector is the individual's current values outside the group.
Genome complement_individual(const PartialSolution& partial, const Genome& own_full);

// Classic-CC complement: all partials are completed with the same shared
// vector. Ablation baseline only.
Genome complement_shared(const PartialSolution& partial, const Genome& shared_vector);

struct CcSettings {
  StepSettings step{};
  std::vector<int> m_pool{2, 3, 4};
  ComplementMode complement = ComplementMode::kIndividual;
};

struct IterationOutcome {
  int m = 0;
  int subproblems_completed = 0;
  std::uint64_t evaluations = 0;
  bool truncated = false;  // budget ran out mid-iteration
};

// One outer CCNCS iteration: draw M, build a fresh random grouping, then run
// one synchronous NCS step per sub-problem in sequence. Sub-problem steps that
// would exceed `budget_remaining` are skipped (whole steps only).
IterationOutcome ccncs_iteration(Population& pop, Problem& problem, const CcSettings& settings,
                                 std::uint64_t master_seed, std::uint64_t iteration,
                                 std::uint64_t budget_remaining);

enum class Algorithm { kNcs, kCcncs, kCcncsSharedComplement, kHillclimb };

Algorithm algorithm_from_name(const std::string& name);
std::string algorithm_name(Algorithm alg);

struct OptimizerSettings {
  Algorithm algorithm = Algorithm::kCcncs;
  int lambda = 6;
  double sigma_init = 0.2;
  double phi = 1.0;
  bool normalize = true;
  std::vector<int> m_pool{2, 3, 4};
  OneFifthRule one_fifth{};
  std::uint64_t budget_evals = 0;
  std::uint64_t master_seed = 0;
  int workers = 1;
  // Initial coordinate range when the problem declares no bounds (policy
  // weights); bounded problems initialize uniformly inside their bounds.
  double init_low = -0.5;
  double init_high = 0.5;
};

struct RunLogRow {
  std::uint64_t iteration = 0;
  int m = 0;
  std::uint64_t evaluations_used = 0;  // cumulative
  double best_score = 0.0;             // internal maximization convention
  std::vector<double> fitness;         // per-process cached fitness
  std::vector<double> diversity;       // per-process full-space nearest-neighbor distance
  std::vector<double> mean_sigma;      // per-process mean step size
};

struct RunLog {
  std::vector<RunLogRow> rows;
  BestSolution best_ever;
  std::vector<Genome> final_means;     // per-process means at termination
  std::vector<BestSolution> process_bests;  // best solution each process ever evaluated
  Genome final_population_best;        // genome of the best process at the end
  double final_population_best_score = 0.0;
  std::uint64_t total_evaluations = 0;
  double wall_seconds = 0.0;
};

// Initializes lambda genomes, evaluates them, then iterates the configured
// algorithm until the evaluation budget is exhausted. All scores in the log
// use the internal maximization convention of `problem`.
RunLog run_optimizer(Problem& problem, const OptimizerSettings& settings);

}  // namespace ncs
