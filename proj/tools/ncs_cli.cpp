#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "ncs/errors.hpp"
#include "ncs/harness.hpp"
#include "ncs/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

int cmd_run(const std::string& path) {
  const ncs::ExperimentConfig cfg = ncs::parse_config_file(path);
  const ncs::ExperimentResult result = ncs::run_experiment(cfg);
  std::printf("best_score=%.17g evaluations=%llu iterations=%zu\n", result.best_score_native,
              static_cast<unsigned long long>(result.log.total_evaluations),
              result.log.rows.size());
  std::printf("log: %s\nsummary: %s\ngenome: %s\n", result.csv_path.c_str(),
              result.summary_path.c_str(), result.genome_path.c_str());
  return kExitOk;
}

int cmd_suite(const std::string& path) {
  const ncs::SuiteResult result = ncs::run_suite_file(path);
  int failed = 0;
  for (const ncs::SuiteCellResult& cell : result.cells) {
    if (cell.ok) {
      std::printf("%s seed=%llu best_score=%.17g\n", cell.name.c_str(),
                  static_cast<unsigned long long>(cell.seed), cell.best_score_native);
    } else {
      std::printf("%s seed=%llu FAILED: %s\n", cell.name.c_str(),
                  static_cast<unsigned long long>(cell.seed), cell.error.c_str());
      ++failed;
    }
  }
  std::printf("summary: %s\n", result.summary_csv.c_str());
  return failed == 0 ? kExitOk : kExitRuntimeError;
}

int cmd_validate(const std::string& path) {
  ncs::parse_config_file(path);
  std::printf("ok\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Negatively correlated search / cooperative coevolution experiment runner"};
  app.require_subcommand(1);

  std::string run_config;
  std::string suite_config;
  std::string validate_config;

  CLI::App* run = app.add_subcommand("run", "Run a single experiment from a JSON config");
  run->add_option("config", run_config, "path to experiment config")->required();
  CLI::App* suite = app.add_subcommand("suite", "Run a grid of experiments x seeds");
  suite->add_option("config", suite_config, "path to suite config")->required();
  CLI::App* validate = app.add_subcommand("validate", "Parse and validate a config, run nothing");
  validate->add_option("config", validate_config, "path to experiment config")->required();
  CLI::App* version = app.add_subcommand("version", "Print the tool version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(run_config);
    if (suite->parsed()) return cmd_suite(suite_config);
    if (validate->parsed()) return cmd_validate(validate_config);
    if (version->parsed()) {
      std::printf("ncs-experiments %s\n", ncs::kVersion);
      return kExitOk;
    }
  } catch (const ncs::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntimeError;
  }
  return kExitConfigError;
}
