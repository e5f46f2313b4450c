#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "ncs/gaussian.hpp"
#include "ncs/problems.hpp"

namespace ncs {

// 1/5 success rule: once `epoch` selection events have accumulated, sigma is
// expanded (divided by r) when the success ratio exceeds 0.2 and contracted
// (multiplied by r) when it falls below.
struct OneFifthRule {
  double r = 0.99;
  int epoch = 10;
  double sigma_floor = 1e-8;
};

struct BestSolution {
  Genome genome;
  double score = -std::numeric_limits<double>::infinity();
};

struct SearchProcess {
  DiagGaussian dist;
  double cached_fitness = 0.0;  // objective value of dist.mean on the full problem
  int success_count = 0;
  int trial_count = 0;
  // Best full solution this process has ever evaluated, accepted or not.
  BestSolution personal_best;
};

struct Population {
  std::vector<SearchProcess> processes;
  BestSolution best_ever;

  explicit Population(std::vector<SearchProcess> procs);

  std::size_t size() const { return processes.size(); }
  int dimension() const { return static_cast<int>(processes.front().dist.mean.size()); }
};

enum class Choice { kParent, kOffspring };

// How a partial candidate is completed to a full solution for evaluation.
// kIndividual scatters into the process's own genome (per-individual
// complementary vector); kSharedBest scatters into the population's best-ever
// genome (classic CC, kept as an ablation baseline).
enum class ComplementMode { kIndividual, kSharedBest };

struct StepSettings {
  double phi = 1.0;
  bool normalize = true;
  OneFifthRule one_fifth{};
  int workers = 1;
};

// mean + sigma (.) z, with each coordinate clipped into [lo, hi] when bounds
// are given (empty spans mean unbounded).
Genome perturb(std::span<const double> mean, std::span<const double> sigma,
               std::span<const double> z, std::span<const double> lo, std::span<const double> hi);

// Offspring draw around the process mean; the offspring distribution reuses
// the parent sigma. Perturbations are keyed per dimension index.
Genome sample_offspring(const SearchProcess& process, std::uint64_t key,
                        std::span<const double> lo, std::span<const double> hi);

double combined_score(double fitness, double div, double phi);

Choice select(double parent_fitness, double parent_div, double offspring_fitness,
              double offspring_div, double phi);

// Independent min-max scaling of both sequences to [0,1]; a constant sequence
// maps to all zeros.
std::pair<std::vector<double>, std::vector<double>> normalize_scores(
    std::span<const double> fitnesses, std::span<const double> diversities);

// One selection event: bumps the trial counter, credits a success when the
// offspring was accepted, and applies the 1/5 rule when the epoch is full.
void update_sigma(SearchProcess& process, bool offspring_accepted, const OneFifthRule& rule);

struct StepOutcome {
  std::uint64_t evaluations = 0;
  int accepted = 0;
  int rejected_non_finite = 0;
};

// One synchronous NCS step restricted to the dimensions in `group` (sorted
// ascending). Samples one offspring per process, evaluates all of them,
// compares against the snapshot of parent distributions, commits replacements
// atomically, and runs the sigma rule. Consumes lambda evaluations
// (2*lambda under kSharedBest, which must re-evaluate parents in the shared
// context).
StepOutcome ncs_subspace_step(Population& pop, Problem& problem, std::span<const int> group,
                              const StepSettings& settings, std::uint64_t master_seed,
                              std::uint64_t iteration, std::uint64_t subproblem_index,
                              ComplementMode mode = ComplementMode::kIndividual);

// Full flat NCS-C iteration over all dimensions. Exactly lambda evaluations.
StepOutcome ncs_step(Population& pop, Problem& problem, const StepSettings& settings,
                     std::uint64_t master_seed, std::uint64_t iteration);

// Evaluates candidates[i] with eval_seeds[i], using up to `workers` threads.
// Results are written by index, so the output is scheduling-independent.
std::vector<double> evaluate_batch(Problem& problem, std::span<const Genome> candidates,
                                   std::span<const std::uint64_t> eval_seeds, int workers);

}  // namespace ncs
