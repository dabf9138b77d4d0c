#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "mlsqr/krylov.hpp"
#include "mlsqr/penalty.hpp"
#include "mlsqr/problems.hpp"
#include "mlsqr/spdsolve.hpp"

namespace mlsqr {

struct ProblemConfig {
  enum class Type { deconv1d, deblur2d };
  Type type = Type::deconv1d;
  std::size_t n = 512;   // deconv1d
  std::size_t nx = 64;   // deblur2d
  std::size_t ny = 64;
  double sigma_f = 0.03;
  double sigma_n = 0.01;
  std::uint64_t seed = 0;
  std::optional<Phantom1D> phantom1d;  // defaults apply when absent
  std::optional<Phantom2D> phantom2d;
  nlohmann::json raw;  // verbatim section, used by `compare` to match problems
};

struct SolverConfig {
  enum class Method { lsqr, mlsqr, cg_normal, lagged_diffusivity };
  Method method = Method::lsqr;
  double tau = 0.0;
  PenaltySpec penalty = PenaltySpec::tikhonov();
  bool penalty_given = false;
  /// Regularizer matrix for mlsqr / cg_normal: "ideal" assembles the
  /// diffusion matrix at the true solution, "laplacian" at the zero field.
  std::string regularizer = "ideal";
  StoppingConfig stopping;
  SpdSolverMode spd_mode = SpdSolverMode::direct_cholesky;
  int k_inner = 30;
  std::optional<double> epsilon;  // nullopt = "auto" (1e-8 * max diagonal)
  int inner_cap = 20;
  double rel_decrease_threshold = 0.15;
  int max_outer = 25;
  bool store_basis = false;
};

struct OutputConfig {
  std::string directory = "out";
  bool traces = true;
  bool solutions = true;
  int basis_vectors = 0;  // dump the first k Krylov basis vectors; 0 = none
  bool outer_snapshots = false;
};

struct ExperimentConfig {
  ProblemConfig problem;
  SolverConfig solver;
  OutputConfig output;
};

/// Parses and validates a configuration document. Unknown keys and
/// out-of-range values raise ConfigError naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string_view to_string(SolverConfig::Method method);

}  // namespace mlsqr
