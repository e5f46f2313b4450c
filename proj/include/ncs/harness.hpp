#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncs/coco.hpp"
#include "ncs/envs.hpp"
#include "ncs/problems.hpp"

namespace ncs {

struct ProblemSpec {
  std::string type;  // "benchmark" or "env"
  std::string name;

  // benchmark
  int dimension = 0;

  // env
  std::vector<int> arch;  // full layer list, input..output
  int episodes = 3;
  int chain_length = 10;
  int horizon = 20;
  double distractor_reward = 0.01;
  int cartpole_max_steps = 500;
};

struct OutputSpec {
  std::string dir = ".";
  std::string prefix = "run";
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kCcncs;
  ProblemSpec problem;
  int lambda = 6;
  double phi = 1.0;
  double sigma_init = 0.2;
  std::vector<int> m_pool{2, 3, 4};
  bool normalize = true;
  OneFifthRule one_fifth{};
  std::uint64_t budget_evals = 0;
  std::uint64_t master_seed = 0;
  int workers = 1;
  double init_low = -0.5;
  double init_high = 0.5;
  OutputSpec output;

  // Fully resolved config for logging. Excludes the worker count and output
  // paths: those are runtime details and must not affect log contents.
  nlohmann::json resolved() const;

  OptimizerSettings optimizer_settings() const;
};

// Parses and validates a config. Unknown keys are rejected by name; NCS_WORKERS
// overrides the worker count.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Problem instance in the optimizer's maximization convention, plus the
// native sense for reporting.
struct BuiltProblem {
  std::shared_ptr<Problem> maximizing;
  Sense native_sense = Sense::kMaximize;
};
BuiltProblem build_problem(const ProblemSpec& spec);

// Converts an internal (maximization) score into the problem's native sense.
double to_native(double internal_score, Sense native_sense);

struct ExperimentResult {
  RunLog log;
  Sense native_sense = Sense::kMaximize;
  double best_score_native = 0.0;
  std::filesystem::path csv_path;
  std::filesystem::path summary_path;
  std::filesystem::path genome_path;
};

// Runs one experiment and writes the iteration CSV, JSON summary, and best
// genome file. Identical config + seed reproduces identical CSV bytes for any
// worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct SuiteCellResult {
  std::string name;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double best_score_native = 0.0;
  std::uint64_t evaluations = 0;
};

struct SuiteResult {
  std::vector<SuiteCellResult> cells;
  std::filesystem::path summary_csv;
};

// Runs every (experiment, seed) cell of a suite config; a failed cell is
// recorded and does not abort the rest. Writes a summary CSV with per-cell
// rows plus mean/median aggregates per experiment.
SuiteResult run_suite(const nlohmann::json& doc);
SuiteResult run_suite_file(const std::filesystem::path& path);

// Number of distinct optima that have at least one candidate within `radius`
// (Euclidean) whose objective value is below `f_threshold`.
int optima_coverage(std::span<const Genome> candidates, std::span<const Genome> optima,
                    double radius, double f_threshold,
                    const std::function<double(std::span<const double>)>& objective);

}  // namespace ncs
