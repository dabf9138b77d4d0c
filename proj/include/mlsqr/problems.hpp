#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mlsqr/grid.hpp"
#include "mlsqr/linop.hpp"
#include "mlsqr/penalty.hpp"
#include "mlsqr/sparse.hpp"
#include "mlsqr/spdsolve.hpp"

namespace mlsqr {

/// Piecewise-constant target on [0, 1]: each (position, level) pair starts a
/// plateau at `level` from `position` on. Positions strictly increasing, the
/// first one at 0.
struct Phantom1D {
  std::vector<std::pair<double, double>> jumps;

  /// Four plateaus including one narrow feature; a stand-in, the reference
  /// experiments never published their target.
  static Phantom1D default_phantom();

  void validate() const;
  std::vector<double> realize(std::size_t n) const;  // cell-centered samples
};

/// Piecewise-constant 2D target on the unit square built from axis-aligned
/// rectangles and disks painted over a zero background (later shapes win).
struct Shape2D {
  enum class Kind { rectangle, disk };
  Kind kind = Kind::rectangle;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // rectangle corners
  double cx = 0, cy = 0, radius = 0;      // disk
  double value = 1.0;
};

struct Phantom2D {
  std::vector<Shape2D> shapes;

  static Phantom2D default_phantom();  // three inclusions, two value levels

  void validate() const;
  std::vector<double> realize(std::size_t nx, std::size_t ny) const;
};

/// A reproducible synthetic experiment: operator, ground truth, and noisy
/// data g = A f_true + n with n ~ N(0, sigma_n^2 I) drawn from the seeded
/// generator.
struct ExperimentBundle {
  std::shared_ptr<const LinearOperator> op;
  std::vector<double> f_true;
  std::vector<double> g;
  double sigma_n = 0.0;
  std::uint64_t seed = 0;
  Grid grid;
  /// Quadrature weight of one data sample (h in 1D, h^2 in 2D); converts
  /// Euclidean residual norms to the function-space norm the noise levels
  /// are quoted in.
  double data_cell_measure = 1.0;
};

ExperimentBundle make_deconv1d(std::size_t n, double sigma_f, double sigma_n,
                               const Phantom1D& phantom, std::uint64_t seed);

ExperimentBundle make_deblur2d(std::size_t nx, std::size_t ny, double sigma_f, double sigma_n,
                               const Phantom2D& phantom, std::uint64_t seed);

/// Diffusion matrix assembled at the true solution (the "ideal", oracle
/// priorconditioner) together with a solver for it.
std::pair<SparseSpd, SpdSolver> make_ideal_preconditioner(
    const ExperimentBundle& bundle, const PenaltySpec& spec,
    std::optional<double> epsilon = std::nullopt,
    SpdSolverMode mode = SpdSolverMode::direct_cholesky, int k_inner = 30);

/// Euclidean error |f - f_true|.
double error_norm(std::span<const double> f, std::span<const double> f_true);
/// Grid-weighted variant sqrt(cell_measure) * |f - f_true|.
double error_norm_weighted(std::span<const double> f, std::span<const double> f_true,
                           double cell_measure);

}  // namespace mlsqr
