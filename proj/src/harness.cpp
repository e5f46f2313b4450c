#include "ncs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "ncs/errors.hpp"
#include "ncs/version.hpp"

namespace ncs {

using nlohmann::json;

namespace {

// One objective evaluation = `episodes` episodes of the configured
// environment, averaged. The environment is instantiated per call so
// concurrent evaluation workers never share live state.
class ErlProblem final : public Problem {
 public:
  ErlProblem(EnvFactory factory, MlpArchitecture arch, int episodes)
      : factory_(std::move(factory)), arch_(std::move(arch)), episodes_(episodes) {
    dim_ = genome_size(arch_);
  }

  int dimension() const override { return dim_; }
  Sense sense() const override { return Sense::kMaximize; }
  bool stochastic() const override { return true; }

 protected:
  double eval_impl(std::span<const double> x, std::uint64_t eval_seed) override {
    const std::unique_ptr<Environment> env = factory_();
    return evaluate_policy(x, arch_, *env, episodes_, eval_seed);
  }

 private:
  EnvFactory factory_;
  MlpArchitecture arch_;
  int episodes_;
  int dim_ = 0;
};

void expect_keys(const json& obj, const std::set<std::string>& allowed, const std::string& ctx) {
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) {
      throw ConfigError("unknown key \"" + item.key() + "\" in " + ctx);
    }
  }
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("invalid value for key \"" + key + "\"");
  }
}

template <class T>
T get_required(const json& obj, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing required key \"" + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("invalid value for key \"" + key + "\"");
  }
}

ProblemSpec parse_problem(const json& doc) {
  ProblemSpec spec;
  const json& p = doc.at("problem");
  if (p.is_string()) {
    // Shorthand: "problem": "<benchmark name>" with top-level "dimension".
    spec.type = "benchmark";
    spec.name = p.get<std::string>();
    spec.dimension = get_required<int>(doc, "dimension");
    return spec;
  }
  if (!p.is_object()) throw ConfigError("\"problem\" must be a string or an object");
  if (doc.contains("dimension")) {
    throw ConfigError("top-level \"dimension\" is only valid with the string problem shorthand");
  }

  spec.type = get_required<std::string>(p, "type");
  spec.name = get_required<std::string>(p, "name");
  if (spec.type == "benchmark") {
    expect_keys(p, {"type", "name", "dimension"}, "problem");
    spec.dimension = get_required<int>(p, "dimension");
  } else if (spec.type == "env") {
    expect_keys(p,
                {"type", "name", "arch", "episodes", "chain_length", "horizon",
                 "distractor_reward", "max_steps"},
                "problem");
    spec.arch = get_required<std::vector<int>>(p, "arch");
    spec.episodes = get_or<int>(p, "episodes", spec.episodes);
    if (spec.name == "sparse_chain") {
      spec.chain_length = get_or<int>(p, "chain_length", spec.chain_length);
      spec.horizon = get_or<int>(p, "horizon", spec.horizon);
      spec.distractor_reward = get_or<double>(p, "distractor_reward", spec.distractor_reward);
    } else if (spec.name == "cartpole") {
      spec.cartpole_max_steps = get_or<int>(p, "max_steps", spec.cartpole_max_steps);
    } else {
      throw ConfigError("unknown environment: " + spec.name);
    }
  } else {
    throw ConfigError("problem \"type\" must be \"benchmark\" or \"env\"");
  }
  return spec;
}

int problem_dimension(const ProblemSpec& spec) {
  if (spec.type == "benchmark") return spec.dimension;
  MlpArchitecture arch{spec.arch};
  return genome_size(arch);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

BuiltProblem build_problem(const ProblemSpec& spec) {
  BuiltProblem out;
  if (spec.type == "benchmark") {
    std::shared_ptr<Problem> p = benchmark(spec.name, spec.dimension);
    out.native_sense = p->sense();
    out.maximizing = p->sense() == Sense::kMinimize ? negate_wrap(std::move(p)) : std::move(p);
    return out;
  }
  if (spec.type == "env") {
    MlpArchitecture arch{spec.arch};
    arch.validate();
    EnvFactory factory;
    if (spec.name == "sparse_chain") {
      const int n = spec.chain_length;
      const int horizon = spec.horizon;
      const double distractor = spec.distractor_reward;
      factory = [n, horizon, distractor] { return sparse_chain(n, horizon, distractor); };
    } else if (spec.name == "cartpole") {
      CartPoleConfig cfg;
      cfg.max_steps = spec.cartpole_max_steps;
      factory = [cfg] { return cartpole(cfg); };
    } else {
      throw ConfigError("unknown environment: " + spec.name);
    }
    const std::unique_ptr<Environment> probe = factory();
    if (arch.input_size() != probe->observation_size()) {
      throw ConfigError("arch input size must equal the environment observation size");
    }
    if (arch.output_size() != probe->action_count()) {
      throw ConfigError("arch output size must equal the environment action count");
    }
    if (spec.episodes < 1) throw ConfigError("episodes must be positive");
    out.native_sense = Sense::kMaximize;
    out.maximizing = std::make_shared<ErlProblem>(std::move(factory), arch, spec.episodes);
    return out;
  }
  throw ConfigError("unknown problem type: " + spec.type);
}

double to_native(double internal_score, Sense native_sense) {
  return native_sense == Sense::kMinimize ? -internal_score : internal_score;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  expect_keys(doc,
              {"schema_version", "algorithm", "problem", "dimension", "lambda", "phi",
               "sigma_init", "m_pool", "normalize", "one_fifth", "budget_evals", "master_seed",
               "workers", "init_range", "output"},
              "config");
  const int schema = get_or<int>(doc, "schema_version", 1);
  if (schema != 1) throw ConfigError("unsupported schema_version");

  ExperimentConfig cfg;
  cfg.algorithm = algorithm_from_name(get_required<std::string>(doc, "algorithm"));
  if (!doc.contains("problem")) throw ConfigError("missing required key \"problem\"");
  cfg.problem = parse_problem(doc);

  cfg.lambda = get_or<int>(doc, "lambda", cfg.lambda);
  if (cfg.lambda < 2) throw ConfigError("lambda must be at least 2 (diversity needs peers)");

  cfg.phi = get_or<double>(doc, "phi", cfg.phi);
  if (!std::isfinite(cfg.phi) || cfg.phi < 0.0) throw ConfigError("phi must be finite and >= 0");

  cfg.sigma_init = get_or<double>(doc, "sigma_init", cfg.sigma_init);
  if (!(cfg.sigma_init > 0.0) || !std::isfinite(cfg.sigma_init)) {
    throw ConfigError("sigma_init must be a positive finite number");
  }

  const bool cc_variant = cfg.algorithm == Algorithm::kCcncs ||
                          cfg.algorithm == Algorithm::kCcncsSharedComplement;
  if (doc.contains("m_pool")) {
    if (!cc_variant) throw ConfigError("m_pool is only valid for ccncs variants");
    cfg.m_pool = get_required<std::vector<int>>(doc, "m_pool");
  }
  if (cc_variant) {
    if (cfg.m_pool.empty()) throw ConfigError("m_pool must not be empty");
    const int dim = problem_dimension(cfg.problem);
    for (int m : cfg.m_pool) {
      if (m < 1) throw ConfigError("m_pool entries must be positive");
      if (m > dim) {
        throw ConfigError("m_pool entry " + std::to_string(m) + " exceeds problem dimension " +
                          std::to_string(dim));
      }
    }
  }

  cfg.normalize = get_or<bool>(doc, "normalize", cfg.normalize);

  if (doc.contains("one_fifth")) {
    const json& of = doc.at("one_fifth");
    expect_keys(of, {"r", "epoch", "sigma_floor"}, "one_fifth");
    cfg.one_fifth.r = get_or<double>(of, "r", cfg.one_fifth.r);
    cfg.one_fifth.epoch = get_or<int>(of, "epoch", cfg.one_fifth.epoch);
    cfg.one_fifth.sigma_floor = get_or<double>(of, "sigma_floor", cfg.one_fifth.sigma_floor);
    if (!(cfg.one_fifth.r > 0.0 && cfg.one_fifth.r < 1.0)) {
      throw ConfigError("one_fifth.r must lie in (0, 1)");
    }
    if (cfg.one_fifth.epoch < 1) throw ConfigError("one_fifth.epoch must be positive");
    if (!(cfg.one_fifth.sigma_floor > 0.0)) throw ConfigError("one_fifth.sigma_floor must be positive");
  }

  cfg.budget_evals = get_required<std::uint64_t>(doc, "budget_evals");
  if (cfg.budget_evals < static_cast<std::uint64_t>(cfg.lambda)) {
    throw ConfigError("budget_evals must cover at least the lambda initialization evaluations");
  }
  cfg.master_seed = get_required<std::uint64_t>(doc, "master_seed");

  cfg.workers = get_or<int>(doc, "workers", cfg.workers);
  if (const char* env = std::getenv("NCS_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("NCS_WORKERS must be a positive integer");
    cfg.workers = static_cast<int>(v);
  }
  if (cfg.workers < 1) throw ConfigError("workers must be positive");

  if (doc.contains("init_range")) {
    const auto range = get_required<std::vector<double>>(doc, "init_range");
    if (range.size() != 2 || !(range[0] < range[1])) {
      throw ConfigError("init_range must be [low, high] with low < high");
    }
    cfg.init_low = range[0];
    cfg.init_high = range[1];
  }

  if (doc.contains("output")) {
    const json& out = doc.at("output");
    expect_keys(out, {"dir", "prefix"}, "output");
    cfg.output.dir = get_or<std::string>(out, "dir", cfg.output.dir);
    cfg.output.prefix = get_or<std::string>(out, "prefix", cfg.output.prefix);
  }

  // Fail early on inconsistent problem parameters.
  build_problem(cfg.problem);
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json ExperimentConfig::resolved() const {
  json p;
  if (problem.type == "benchmark") {
    p = {{"type", "benchmark"}, {"name", problem.name}, {"dimension", problem.dimension}};
  } else {
    p = {{"type", "env"}, {"name", problem.name}, {"arch", problem.arch},
         {"episodes", problem.episodes}};
    if (problem.name == "sparse_chain") {
      p["chain_length"] = problem.chain_length;
      p["horizon"] = problem.horizon;
      p["distractor_reward"] = problem.distractor_reward;
    } else {
      p["max_steps"] = problem.cartpole_max_steps;
    }
  }
  json doc = {
      {"schema_version", 1},
      {"version", kVersion},
      {"algorithm", algorithm_name(algorithm)},
      {"problem", p},
      {"lambda", lambda},
      {"phi", phi},
      {"sigma_init", sigma_init},
      {"normalize", normalize},
      {"one_fifth",
       {{"r", one_fifth.r}, {"epoch", one_fifth.epoch}, {"sigma_floor", one_fifth.sigma_floor}}},
      {"budget_evals", budget_evals},
      {"master_seed", master_seed},
      {"init_range", {init_low, init_high}},
  };
  if (algorithm == Algorithm::kCcncs || algorithm == Algorithm::kCcncsSharedComplement) {
    doc["m_pool"] = m_pool;
  }
  return doc;
}

OptimizerSettings ExperimentConfig::optimizer_settings() const {
  OptimizerSettings s;
  s.algorithm = algorithm;
  s.lambda = lambda;
  s.sigma_init = sigma_init;
  s.phi = phi;
  s.normalize = normalize;
  s.m_pool = m_pool;
  s.one_fifth = one_fifth;
  s.budget_evals = budget_evals;
  s.master_seed = master_seed;
  s.workers = workers;
  s.init_low = init_low;
  s.init_high = init_high;
  return s;
}

namespace {

void write_csv(const std::filesystem::path& path, const ExperimentConfig& cfg, const RunLog& log,
               Sense native) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write iteration log: " + path.string());
  out << "# ncs-experiments v" << kVersion << "\n";
  out << "# config " << cfg.resolved().dump() << "\n";
  out << "iteration,m,evaluations,best_score";
  for (int i = 0; i < cfg.lambda; ++i) out << ",fitness_" << i;
  for (int i = 0; i < cfg.lambda; ++i) out << ",diversity_" << i;
  for (int i = 0; i < cfg.lambda; ++i) out << ",mean_sigma_" << i;
  out << "\n";
  for (const RunLogRow& row : log.rows) {
    out << row.iteration << ',' << row.m << ',' << row.evaluations_used << ','
        << fmt(to_native(row.best_score, native));
    for (double f : row.fitness) out << ',' << fmt(to_native(f, native));
    for (double d : row.diversity) out << ',' << fmt(d);
    for (double s : row.mean_sigma) out << ',' << fmt(s);
    out << "\n";
  }
}

void write_genome(const std::filesystem::path& path, const Genome& genome) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write genome file: " + path.string());
  for (double v : genome) out << fmt(v) << "\n";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  BuiltProblem built = build_problem(config.problem);

  RunLog log = run_optimizer(*built.maximizing, config.optimizer_settings());

  ExperimentResult result;
  result.native_sense = built.native_sense;
  result.best_score_native = to_native(log.best_ever.score, built.native_sense);

  const std::filesystem::path dir(config.output.dir);
  std::filesystem::create_directories(dir);
  result.csv_path = dir / (config.output.prefix + "_log.csv");
  result.summary_path = dir / (config.output.prefix + "_summary.json");
  result.genome_path = dir / (config.output.prefix + "_best_genome.txt");

  write_csv(result.csv_path, config, log, built.native_sense);
  write_genome(result.genome_path, log.best_ever.genome);

  json summary = {
      {"version", kVersion},
      {"config", config.resolved()},
      {"workers", config.workers},
      {"total_evaluations", log.total_evaluations},
      {"problem_side_evaluations", built.maximizing->evaluations()},
      {"iterations", log.rows.size()},
      {"best_score", result.best_score_native},
      {"final_population_best_score",
       to_native(log.final_population_best_score, built.native_sense)},
      {"wall_seconds", log.wall_seconds},
      {"files",
       {{"iteration_log", result.csv_path.string()},
        {"best_genome", result.genome_path.string()}}},
  };
  std::ofstream out(result.summary_path);
  if (!out) throw std::runtime_error("cannot write summary: " + result.summary_path.string());
  out << summary.dump(2) << "\n";

  result.log = std::move(log);
  return result;
}

SuiteResult run_suite(const json& doc) {
  if (!doc.is_object()) throw ConfigError("suite config must be a JSON object");
  expect_keys(doc, {"schema_version", "seeds", "output_dir", "experiments"}, "suite config");
  const int schema = get_or<int>(doc, "schema_version", 1);
  if (schema != 1) throw ConfigError("unsupported schema_version");
  const auto seeds = get_required<std::vector<std::uint64_t>>(doc, "seeds");
  if (seeds.empty()) throw ConfigError("suite needs at least one seed");
  const std::string output_dir = get_or<std::string>(doc, "output_dir", std::string("."));
  if (!doc.contains("experiments") || !doc.at("experiments").is_array() ||
      doc.at("experiments").empty()) {
    throw ConfigError("suite needs a non-empty \"experiments\" array");
  }

  // Validate all cells before running anything.
  struct Cell {
    std::string name;
    json config;
  };
  std::vector<Cell> cells;
  for (const json& entry : doc.at("experiments")) {
    expect_keys(entry, {"name", "config"}, "suite experiment entry");
    Cell cell;
    cell.name = get_required<std::string>(entry, "name");
    cell.config = entry.at("config");
    json probe = cell.config;
    probe["master_seed"] = seeds.front();
    parse_config(probe);
    cells.push_back(std::move(cell));
  }

  SuiteResult result;
  for (const Cell& cell : cells) {
    for (std::uint64_t seed : seeds) {
      SuiteCellResult r;
      r.name = cell.name;
      r.seed = seed;
      try {
        json cfg_json = cell.config;
        cfg_json["master_seed"] = seed;
        cfg_json["output"] = {{"dir", output_dir},
                              {"prefix", cell.name + "_seed" + std::to_string(seed)}};
        const ExperimentConfig cfg = parse_config(cfg_json);
        const ExperimentResult er = run_experiment(cfg);
        r.ok = true;
        r.best_score_native = er.best_score_native;
        r.evaluations = er.log.total_evaluations;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      result.cells.push_back(std::move(r));
    }
  }

  std::filesystem::create_directories(output_dir);
  result.summary_csv = std::filesystem::path(output_dir) / "suite_summary.csv";
  std::ofstream out(result.summary_csv);
  if (!out) throw std::runtime_error("cannot write suite summary: " + result.summary_csv.string());
  out << "experiment,seed,status,best_score,evaluations\n";
  for (const SuiteCellResult& r : result.cells) {
    out << r.name << ',' << r.seed << ',' << (r.ok ? "ok" : "failed") << ','
        << (r.ok ? fmt(r.best_score_native) : "") << ',' << r.evaluations << "\n";
  }
  for (const Cell& cell : cells) {
    std::vector<double> finals;
    for (const SuiteCellResult& r : result.cells) {
      if (r.ok && r.name == cell.name) finals.push_back(r.best_score_native);
    }
    if (finals.empty()) continue;
    std::sort(finals.begin(), finals.end());
    const double mean =
        std::accumulate(finals.begin(), finals.end(), 0.0) / static_cast<double>(finals.size());
    const std::size_t n = finals.size();
    const double median = n % 2 == 1 ? finals[n / 2] : 0.5 * (finals[n / 2 - 1] + finals[n / 2]);
    out << cell.name << ",mean,aggregate," << fmt(mean) << ",\n";
    out << cell.name << ",median,aggregate," << fmt(median) << ",\n";
  }
  return result;
}

SuiteResult run_suite_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open suite config file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return run_suite(doc);
}

int optima_coverage(std::span<const Genome> candidates, std::span<const Genome> optima,
                    double radius, double f_threshold,
                    const std::function<double(std::span<const double>)>& objective) {
  int covered = 0;
  for (const Genome& opt : optima) {
    for (const Genome& cand : candidates) {
      require(cand.size() == opt.size(), "optima_coverage: dimension mismatch");
      double dist2 = 0.0;
      for (std::size_t k = 0; k < cand.size(); ++k) {
        const double d = cand[k] - opt[k];
        dist2 += d * d;
      }
      if (dist2 <= radius * radius && objective(cand) < f_threshold) {
        ++covered;
        break;
      }
    }
  }
  return covered;
}

}  // namespace ncs
