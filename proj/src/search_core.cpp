#include "ncs/search_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "ncs/errors.hpp"
#include "ncs/rng.hpp"

namespace ncs {

Population::Population(std::vector<SearchProcess> procs) : processes(std::move(procs)) {
  require(processes.size() >= 2, "Population: at least 2 search processes required");
  const std::size_t dim = processes.front().dist.mean.size();
  for (const SearchProcess& p : processes) {
    require(p.dist.mean.size() == dim && p.dist.sigma.size() == dim,
            "Population: inconsistent process dimensions");
  }
}

Genome perturb(std::span<const double> mean, std::span<const double> sigma,
               std::span<const double> z, std::span<const double> lo, std::span<const double> hi) {
  require(mean.size() == sigma.size() && mean.size() == z.size(),
          "perturb: dimension mismatch");
  Genome out(mean.size());
  for (std::size_t k = 0; k < mean.size(); ++k) {
    double v = mean[k] + sigma[k] * z[k];
    if (!lo.empty()) v = std::clamp(v, lo[k], hi[k]);
    out[k] = v;
  }
  return out;
}

Genome sample_offspring(const SearchProcess& process, std::uint64_t key,
                        std::span<const double> lo, std::span<const double> hi) {
  std::vector<double> z(process.dist.mean.size());
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = rng::normal_at(key, k);
  return perturb(process.dist.mean, process.dist.sigma, z, lo, hi);
}

double combined_score(double fitness, double div, double phi) { return fitness + phi * div; }

Choice select(double parent_fitness, double parent_div, double offspring_fitness,
              double offspring_div, double phi) {
  const double parent = combined_score(parent_fitness, parent_div, phi);
  const double offspring = combined_score(offspring_fitness, offspring_div, phi);
  return offspring > parent ? Choice::kOffspring : Choice::kParent;
}

namespace {

std::vector<double> min_max_scale(std::span<const double> values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  std::vector<double> out(values.size(), 0.0);
  const double range = *hi - *lo;
  if (range > 0.0) {
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / range;
  }
  return out;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> normalize_scores(
    std::span<const double> fitnesses, std::span<const double> diversities) {
  require(!fitnesses.empty() && !diversities.empty(), "normalize_scores: empty input");
  return {min_max_scale(fitnesses), min_max_scale(diversities)};
}

void update_sigma(SearchProcess& process, bool offspring_accepted, const OneFifthRule& rule) {
  ++process.trial_count;
  if (offspring_accepted) ++process.success_count;
  if (process.trial_count < rule.epoch) return;

  const double ratio = static_cast<double>(process.success_count) / rule.epoch;
  double factor = 1.0;
  if (ratio > 0.2) {
    factor = 1.0 / rule.r;
  } else if (ratio < 0.2) {
    factor = rule.r;
  }
  for (double& s : process.dist.sigma) {
    s = std::max(s * factor, rule.sigma_floor);
  }
  process.trial_count = 0;
  process.success_count = 0;
}

std::vector<double> evaluate_batch(Problem& problem, std::span<const Genome> candidates,
                                   std::span<const std::uint64_t> eval_seeds, int workers) {
  require(candidates.size() == eval_seeds.size(), "evaluate_batch: seed count mismatch");
  const std::size_t n = candidates.size();
  std::vector<double> scores(n);
  const int threads = std::min<int>(std::max(workers, 1), static_cast<int>(n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) scores[i] = problem.evaluate(candidates[i], eval_seeds[i]);
    return scores;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) {
        scores[i] = problem.evaluate(candidates[i], eval_seeds[i]);
      }
    });
  }
  for (std::thread& th : pool) th.join();
  return scores;
}

namespace {

void gather(const std::vector<double>& full, std::span<const int> group, std::vector<double>& out) {
  out.resize(group.size());
  for (std::size_t t = 0; t < group.size(); ++t) out[t] = full[static_cast<std::size_t>(group[t])];
}

void consider_best(BestSolution& best, const Genome& genome, double score) {
  if (std::isfinite(score) && score > best.score) {
    best.genome = genome;
    best.score = score;
  }
}

}  // namespace

StepOutcome ncs_subspace_step(Population& pop, Problem& problem, std::span<const int> group,
                              const StepSettings& settings, std::uint64_t master_seed,
                              std::uint64_t iteration, std::uint64_t subproblem_index,
                              ComplementMode mode) {
  using rng::Stream;
  const std::size_t lambda = pop.size();
  const std::size_t g = group.size();
  require(g > 0, "ncs_subspace_step: empty dimension group");

  const std::span<const double> lo = problem.lower_bounds();
  const std::span<const double> hi = problem.upper_bounds();

  // Snapshot of the full parent distributions plus their restriction to the
  // active group. All diversity comparisons of this step are against this
  // snapshot.
  std::vector<DiagGaussian> full_parents(lambda);
  std::vector<DiagGaussian> parents(lambda);
  for (std::size_t i = 0; i < lambda; ++i) {
    full_parents[i] = pop.processes[i].dist;
    gather(pop.processes[i].dist.mean, group, parents[i].mean);
    gather(pop.processes[i].dist.sigma, group, parents[i].sigma);
  }

  // Sample one offspring partial per process. Draws are keyed per global
  // dimension index, so the result does not depend on group ordering.
  std::vector<std::vector<double>> offspring(lambda);
  for (std::size_t i = 0; i < lambda; ++i) {
    const std::uint64_t key =
        rng::derive(master_seed, Stream::kOffspring, iteration, subproblem_index, i);
    offspring[i].resize(g);
    for (std::size_t t = 0; t < g; ++t) {
      const std::size_t k = static_cast<std::size_t>(group[t]);
      double v = parents[i].mean[t] + parents[i].sigma[t] * rng::normal_at(key, k);
      if (!lo.empty()) v = std::clamp(v, lo[k], hi[k]);
      offspring[i][t] = v;
    }
  }

  // Assemble full candidates and evaluate them in one batch.
  const bool shared = mode == ComplementMode::kSharedBest;
  if (shared) {
    require(pop.best_ever.genome.size() == pop.processes.front().dist.mean.size(),
            "ncs_subspace_step: shared complement requires an initialized best-ever genome");
  }
  std::vector<Genome> candidates;
  std::vector<std::uint64_t> seeds;
  candidates.reserve(shared ? 2 * lambda : lambda);
  for (std::size_t i = 0; i < lambda; ++i) {
    Genome full = shared ? pop.best_ever.genome : pop.processes[i].dist.mean;
    for (std::size_t t = 0; t < g; ++t) full[static_cast<std::size_t>(group[t])] = offspring[i][t];
    candidates.push_back(std::move(full));
    seeds.push_back(rng::derive(master_seed, Stream::kEval, iteration, subproblem_index, i));
  }
  if (shared) {
    // Classic CC cannot reuse cached fitness: the shared context changes, so
    // parents must be re-evaluated inside it as well.
    for (std::size_t i = 0; i < lambda; ++i) {
      Genome full = pop.best_ever.genome;
      for (std::size_t t = 0; t < g; ++t)
        full[static_cast<std::size_t>(group[t])] = parents[i].mean[t];
      candidates.push_back(std::move(full));
      seeds.push_back(
          rng::derive(master_seed, Stream::kEval, iteration, subproblem_index, lambda + i));
    }
  }
  const std::vector<double> scores =
      evaluate_batch(problem, candidates, seeds, settings.workers);

  StepOutcome outcome;
  outcome.evaluations = candidates.size();

  std::vector<double> parent_fitness(lambda);
  for (std::size_t i = 0; i < lambda; ++i) {
    parent_fitness[i] = shared ? scores[lambda + i] : pop.processes[i].cached_fitness;
  }
  std::vector<double> offspring_fitness(scores.begin(), scores.begin() + lambda);

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    consider_best(pop.best_ever, candidates[i], scores[i]);
    // Candidate i (and, in shared mode, the re-evaluated parent at lambda+i)
    // carries process i's partial solution.
    consider_best(pop.processes[i % lambda].personal_best, candidates[i], scores[i]);
  }

  // Diversities of parents and offspring against the parent snapshot. Each
  // candidate's distribution is the process's full search distribution (the
  // offspring differs from its parent only in the group coordinates), so the
  // diversity is comparable across sub-problems of any size.
  std::vector<double> parent_div(lambda);
  std::vector<double> offspring_div(lambda);
  for (std::size_t i = 0; i < lambda; ++i) {
    DiagGaussian offspring_dist = full_parents[i];
    for (std::size_t t = 0; t < g; ++t) {
      offspring_dist.mean[static_cast<std::size_t>(group[t])] = offspring[i][t];
    }
    double pd = std::numeric_limits<double>::infinity();
    double od = std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < lambda; ++o) {
      if (o == i) continue;
      pd = std::min(pd, bhattacharyya(full_parents[i], full_parents[o]));
      od = std::min(od, bhattacharyya(offspring_dist, full_parents[o]));
    }
    parent_div[i] = pd;
    offspring_div[i] = od;
  }

  // Optional min-max normalization over the 2*lambda candidates of this step,
  // so fitness and diversity compare on a common scale.
  std::vector<double> nf_parent = parent_fitness;
  std::vector<double> nf_offspring = offspring_fitness;
  std::vector<double> nd_parent = parent_div;
  std::vector<double> nd_offspring = offspring_div;
  if (settings.normalize) {
    std::vector<double> all_f;
    std::vector<double> all_d;
    all_f.reserve(2 * lambda);
    all_d.reserve(2 * lambda);
    all_f.insert(all_f.end(), parent_fitness.begin(), parent_fitness.end());
    all_f.insert(all_f.end(), offspring_fitness.begin(), offspring_fitness.end());
    all_d.insert(all_d.end(), parent_div.begin(), parent_div.end());
    all_d.insert(all_d.end(), offspring_div.begin(), offspring_div.end());
    // Non-finite offspring scores are excluded from scaling by replacing them
    // with the parent value; they are rejected below regardless.
    for (std::size_t i = 0; i < lambda; ++i) {
      if (!std::isfinite(all_f[lambda + i])) all_f[lambda + i] = all_f[i];
    }
    auto [nf, nd] = normalize_scores(all_f, all_d);
    for (std::size_t i = 0; i < lambda; ++i) {
      nf_parent[i] = nf[i];
      nf_offspring[i] = nf[lambda + i];
      nd_parent[i] = nd[i];
      nd_offspring[i] = nd[lambda + i];
    }
  }

  // Selection and atomic commit.
  for (std::size_t i = 0; i < lambda; ++i) {
    bool accepted = false;
    if (!std::isfinite(offspring_fitness[i])) {
      ++outcome.rejected_non_finite;
      std::fprintf(stderr,
                   "warning: non-finite objective value, rejecting candidate "
                   "(iteration %llu, sub-problem %llu, process %zu)\n",
                   static_cast<unsigned long long>(iteration),
                   static_cast<unsigned long long>(subproblem_index), i);
    } else if (!std::isfinite(parent_fitness[i])) {
      accepted = true;
    } else {
      accepted = select(nf_parent[i], nd_parent[i], nf_offspring[i], nd_offspring[i],
                        settings.phi) == Choice::kOffspring;
    }

    SearchProcess& proc = pop.processes[i];
    if (accepted) {
      for (std::size_t t = 0; t < g; ++t) {
        proc.dist.mean[static_cast<std::size_t>(group[t])] = offspring[i][t];
      }
      proc.cached_fitness = offspring_fitness[i];
      ++outcome.accepted;
    }
    update_sigma(proc, accepted, settings.one_fifth);
  }

  return outcome;
}

StepOutcome ncs_step(Population& pop, Problem& problem, const StepSettings& settings,
                     std::uint64_t master_seed, std::uint64_t iteration) {
  std::vector<int> all(static_cast<std::size_t>(pop.dimension()));
  std::iota(all.begin(), all.end(), 0);
  return ncs_subspace_step(pop, problem, all, settings, master_seed, iteration, 0);
}

}  // namespace ncs
