#include "ncs/coco.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ncs/errors.hpp"

namespace ncs {

int GroupingPlan::dimension() const {
  std::size_t d = 0;
  for (const auto& g : groups) d += g.size();
  return static_cast<int>(d);
}

void GroupingPlan::validate(int expected_dimension) const {
  require(!groups.empty(), "GroupingPlan: no groups");
  std::vector<char> seen(static_cast<std::size_t>(expected_dimension), 0);
  std::size_t min_size = static_cast<std::size_t>(expected_dimension);
  std::size_t max_size = 0;
  for (const auto& g : groups) {
    require(!g.empty(), "GroupingPlan: empty group");
    min_size = std::min(min_size, g.size());
    max_size = std::max(max_size, g.size());
    for (int k : g) {
      require(k >= 0 && k < expected_dimension, "GroupingPlan: index out of range");
      require(!seen[static_cast<std::size_t>(k)], "GroupingPlan: duplicate index");
      seen[static_cast<std::size_t>(k)] = 1;
    }
  }
  require(dimension() == expected_dimension, "GroupingPlan: union is not the full index set");
  require(max_size - min_size <= 1, "GroupingPlan: unbalanced groups");
}

int choose_m(std::span<const int> pool, rng::SplitMix64& stream) {
  require(!pool.empty(), "choose_m: empty pool");
  return pool[stream.below(pool.size())];
}

GroupingPlan random_grouping(int dimension, int m, rng::SplitMix64& stream) {
  require(dimension >= 1, "random_grouping: dimension must be positive");
  require(m >= 1 && m <= dimension, "random_grouping: need 1 <= M <= D");

  std::vector<int> indices(static_cast<std::size_t>(dimension));
  std::iota(indices.begin(), indices.end(), 0);
  for (std::size_t i = indices.size() - 1; i > 0; --i) {
    std::swap(indices[i], indices[stream.below(i + 1)]);
  }

  GroupingPlan plan;
  plan.groups.resize(static_cast<std::size_t>(m));
  const int base = dimension / m;
  const int extra = dimension % m;  // first `extra` groups get one more index
  std::size_t pos = 0;
  for (int j = 0; j < m; ++j) {
    const int size = base + (j < extra ? 1 : 0);
    auto& group = plan.groups[static_cast<std::size_t>(j)];
    group.assign(indices.begin() + pos, indices.begin() + pos + size);
    std::sort(group.begin(), group.end());
    pos += static_cast<std::size_t>(size);
  }
  return plan;
}

PartialSolution extract_partial(const Genome& full, std::vector<int> group) {
  PartialSolution out;
  out.values.reserve(group.size());
  for (int k : group) {
    require(k >= 0 && static_cast<std::size_t>(k) < full.size(),
            "extract_partial: index out of range");
    out.values.push_back(full[static_cast<std::size_t>(k)]);
  }
  out.group = std::move(group);
  return out;
}

namespace {

Genome scatter(const PartialSolution& partial, const Genome& context) {
  require(partial.values.size() == partial.group.size(),
          "complement: partial/group length mismatch");
  Genome out = context;
  for (std::size_t t = 0; t < partial.group.size(); ++t) {
    const int k = partial.group[t];
    require(k >= 0 && static_cast<std::size_t>(k) < out.size(),
            "complement: index out of range");
    out[static_cast<std::size_t>(k)] = partial.values[t];
  }
  return out;
}

}  // namespace

Genome complement_individual(const PartialSolution& partial, const Genome& own_full) {
  return scatter(partial, own_full);
}

Genome complement_shared(const PartialSolution& partial, const Genome& shared_vector) {
  return scatter(partial, shared_vector);
}

IterationOutcome ccncs_iteration(Population& pop, Problem& problem, const CcSettings& settings,
                                 std::uint64_t master_seed, std::uint64_t iteration,
                                 std::uint64_t budget_remaining) {
  using rng::Stream;
  const int dim = pop.dimension();
  for (int m : settings.m_pool) {
    require(m >= 1 && m <= dim, "ccncs_iteration: m_pool entry outside 1..D");
  }

  rng::SplitMix64 m_stream(rng::derive(master_seed, Stream::kChooseM, iteration));
  const int m = choose_m(settings.m_pool, m_stream);
  rng::SplitMix64 group_stream(rng::derive(master_seed, Stream::kGrouping, iteration));
  const GroupingPlan plan = random_grouping(dim, m, group_stream);

  const std::uint64_t step_cost =
      (settings.complement == ComplementMode::kSharedBest ? 2 : 1) * pop.size();

  IterationOutcome outcome;
  outcome.m = m;
  for (int j = 0; j < m; ++j) {
    if (budget_remaining - outcome.evaluations < step_cost) {
      outcome.truncated = true;
      break;
    }
    const StepOutcome step =
        ncs_subspace_step(pop, problem, plan.groups[static_cast<std::size_t>(j)], settings.step,
                          master_seed, iteration, static_cast<std::uint64_t>(j),
                          settings.complement);
    outcome.evaluations += step.evaluations;
    ++outcome.subproblems_completed;
  }
  return outcome;
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "ncs") return Algorithm::kNcs;
  if (name == "ccncs") return Algorithm::kCcncs;
  if (name == "ccncs-shared-complement") return Algorithm::kCcncsSharedComplement;
  if (name == "hillclimb-baseline") return Algorithm::kHillclimb;
  throw ConfigError("unknown algorithm: " + name);
}

std::string algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::kNcs: return "ncs";
    case Algorithm::kCcncs: return "ccncs";
    case Algorithm::kCcncsSharedComplement: return "ccncs-shared-complement";
    case Algorithm::kHillclimb: return "hillclimb-baseline";
  }
  return "?";
}

namespace {

std::vector<double> full_space_diversities(const Population& pop) {
  const std::size_t lambda = pop.size();
  std::vector<double> out(lambda);
  for (std::size_t i = 0; i < lambda; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < lambda; ++o) {
      if (o == i) continue;
      best = std::min(best, bhattacharyya(pop.processes[i].dist, pop.processes[o].dist));
    }
    out[i] = best;
  }
  return out;
}

RunLogRow make_row(const Population& pop, std::uint64_t iteration, int m,
                   std::uint64_t evals_used) {
  RunLogRow row;
  row.iteration = iteration;
  row.m = m;
  row.evaluations_used = evals_used;
  row.best_score = pop.best_ever.score;
  row.diversity = full_space_diversities(pop);
  for (const SearchProcess& p : pop.processes) {
    row.fitness.push_back(p.cached_fitness);
    double s = 0.0;
    for (double v : p.dist.sigma) s += v;
    row.mean_sigma.push_back(s / static_cast<double>(p.dist.sigma.size()));
  }
  return row;
}

}  // namespace

RunLog run_optimizer(Problem& problem, const OptimizerSettings& settings) {
  using rng::Stream;
  require(problem.sense() == Sense::kMaximize,
          "run_optimizer: wrap minimization problems with negate_wrap first");
  require(settings.lambda >= 2, "run_optimizer: lambda must be at least 2");
  const auto start = std::chrono::steady_clock::now();

  const int dim = problem.dimension();
  const std::span<const double> lo = problem.lower_bounds();
  const std::span<const double> hi = problem.upper_bounds();
  const std::size_t lambda = static_cast<std::size_t>(settings.lambda);

  // Initial population: uniform within bounds, or within [init_low, init_high]
  // for unbounded (policy-weight) problems.
  std::vector<SearchProcess> procs(lambda);
  std::vector<Genome> init_genomes(lambda);
  std::vector<std::uint64_t> init_seeds(lambda);
  for (std::size_t i = 0; i < lambda; ++i) {
    const std::uint64_t key = rng::derive(settings.master_seed, Stream::kInit, i);
    Genome g(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
      const double a = lo.empty() ? settings.init_low : lo[static_cast<std::size_t>(k)];
      const double b = hi.empty() ? settings.init_high : hi[static_cast<std::size_t>(k)];
      g[static_cast<std::size_t>(k)] =
          a + (b - a) * rng::uniform_at(key, static_cast<std::uint64_t>(k));
    }
    init_genomes[i] = std::move(g);
    init_seeds[i] = rng::derive(settings.master_seed, Stream::kEval, std::uint64_t{0},
                                std::uint64_t{0}, i);
  }
  const std::vector<double> init_scores =
      evaluate_batch(problem, init_genomes, init_seeds, settings.workers);

  RunLog log;
  for (std::size_t i = 0; i < lambda; ++i) {
    procs[i].dist.mean = init_genomes[i];
    procs[i].dist.sigma.assign(static_cast<std::size_t>(dim), settings.sigma_init);
    procs[i].cached_fitness = init_scores[i];
    if (std::isfinite(init_scores[i])) {
      procs[i].personal_best.genome = init_genomes[i];
      procs[i].personal_best.score = init_scores[i];
    }
  }
  Population pop(std::move(procs));
  for (std::size_t i = 0; i < lambda; ++i) {
    if (std::isfinite(init_scores[i]) && init_scores[i] > pop.best_ever.score) {
      pop.best_ever.genome = init_genomes[i];
      pop.best_ever.score = init_scores[i];
    }
  }

  std::uint64_t used = lambda;

  StepSettings step = {settings.phi, settings.normalize, settings.one_fifth, settings.workers};
  if (settings.algorithm == Algorithm::kHillclimb) {
    // Lambda independent (1+1) hill climbers: the phi=0, no-normalization
    // degenerate case of NCS.
    step.phi = 0.0;
    step.normalize = false;
  }

  CcSettings cc;
  cc.step = step;
  cc.m_pool = settings.m_pool;
  cc.complement = settings.algorithm == Algorithm::kCcncsSharedComplement
                      ? ComplementMode::kSharedBest
                      : ComplementMode::kIndividual;
  const bool decomposed = settings.algorithm == Algorithm::kCcncs ||
                          settings.algorithm == Algorithm::kCcncsSharedComplement;

  for (std::uint64_t iteration = 1; used < settings.budget_evals; ++iteration) {
    const std::uint64_t remaining = settings.budget_evals - used;
    if (decomposed) {
      const IterationOutcome it =
          ccncs_iteration(pop, problem, cc, settings.master_seed, iteration, remaining);
      if (it.subproblems_completed == 0) break;
      used += it.evaluations;
      log.rows.push_back(make_row(pop, iteration, it.m, used));
      if (it.truncated) break;
    } else {
      if (remaining < lambda) break;
      const StepOutcome st = ncs_step(pop, problem, step, settings.master_seed, iteration);
      used += st.evaluations;
      log.rows.push_back(make_row(pop, iteration, 1, used));
    }
  }

  log.best_ever = pop.best_ever;
  log.total_evaluations = used;
  for (const SearchProcess& p : pop.processes) {
    log.final_means.push_back(p.dist.mean);
    log.process_bests.push_back(p.personal_best);
  }
  std::size_t best_idx = 0;
  for (std::size_t i = 1; i < lambda; ++i) {
    if (pop.processes[i].cached_fitness > pop.processes[best_idx].cached_fitness) best_idx = i;
  }
  log.final_population_best = pop.processes[best_idx].dist.mean;
  log.final_population_best_score = pop.processes[best_idx].cached_fitness;
  log.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return log;
}

}  // namespace ncs
