#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include "mlsqr/config.hpp"

namespace mlsqr {

struct RunSummary {
  std::string method;
  int inner_iterations = 0;           // total Krylov iterations
  int outer_iterations = 0;           // 0 for single-pass methods
  int iterations_to_discrepancy = -1; // first trace row meeting |r| <= eta delta
  double final_residual = 0.0;        // Euclidean |g - A f|
  double final_residual_weighted = 0.0;
  double final_error = 0.0;  // Euclidean |f - f_true|
  double final_error_weighted = 0.0;
  double final_penalty = 0.0;
  std::string stop_reason;
  double wall_seconds = 0.0;
};

/// Builds the configured problem, runs the configured solver and writes
/// trace.csv / solution.csv / basis_###.csv / meta.json into `out_dir`
/// (which overrides the directory named in the config when nonempty).
RunSummary run_experiment(const ExperimentConfig& cfg,
                          const std::filesystem::path& out_dir,
                          std::optional<std::uint64_t> seed_override, bool quiet);

/// Runs two experiments sharing the same problem section and prints a
/// side-by-side summary table. Throws ConfigError if the problem sections
/// differ.
std::pair<RunSummary, RunSummary> compare_experiments(
    const ExperimentConfig& a, const ExperimentConfig& b,
    const std::filesystem::path& out_root, std::optional<std::uint64_t> seed_override,
    bool quiet);

}  // namespace mlsqr
