#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mlsqr/runner.hpp"

namespace {

// exit codes: 0 ok, 2 usage / missing file, 3 config schema violation,
// 4 solver breakdown, 1 anything else
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitSolver = 4;

mlsqr::ExperimentConfig load_or_exit(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    std::cerr << "error: config file not found: " << path << '\n';
    std::exit(kExitUsage);
  }
  return mlsqr::load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"priorconditioned LSQR experiment harness"};
  app.require_subcommand(1);

  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--seed", seed, "seed override");
  app.add_flag("--quiet", quiet, "suppress console output");

  std::string run_config;
  CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
  run->add_option("config", run_config, "configuration file")->required();

  std::string cmp_a, cmp_b;
  CLI::App* compare = app.add_subcommand("compare", "run two experiments side by side");
  compare->add_option("config_a", cmp_a, "first configuration")->required();
  compare->add_option("config_b", cmp_b, "second configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (run->parsed()) {
      mlsqr::run_experiment(load_or_exit(run_config), out_dir, seed, quiet);
    } else {
      mlsqr::compare_experiments(load_or_exit(cmp_a), load_or_exit(cmp_b), out_dir, seed, quiet);
    }
  } catch (const mlsqr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mlsqr::BreakdownError& e) {
    std::cerr << "solver breakdown: " << e.what() << '\n';
    return kExitSolver;
  } catch (const mlsqr::FactorizationError& e) {
    std::cerr << "factorization failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
