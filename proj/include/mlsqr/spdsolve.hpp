#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mlsqr/sparse.hpp"

namespace mlsqr {

/// A fixed linear map standing in for M^{-1}, applied once per Krylov
/// iteration. The priorconditioned recurrences assume the map is symmetric
/// positive definite; concrete backends (direct factorization, fixed
/// iteration counts of an inner scheme, multigrid cycles) plug in here.
class SpdMap {
 public:
  virtual ~SpdMap() = default;
  virtual std::size_t dimension() const = 0;
  /// v ~= M^{-1} p
  virtual void solve(std::span<const double> p, std::span<double> v) const = 0;
  std::vector<double> solve(std::span<const double> p) const;
};

class IdentityMap final : public SpdMap {
 public:
  explicit IdentityMap(std::size_t n) : n_(n) {}
  using SpdMap::solve;
  std::size_t dimension() const override { return n_; }
  void solve(std::span<const double> p, std::span<double> v) const override;

 private:
  std::size_t n_;
};

enum class SpdSolverMode { direct_cholesky, inner_cg };

/// Solver for M v = p. `factorize` computes an envelope (skyline) Cholesky
/// factorization in natural order and solves exactly up to rounding;
/// `inner_cg` runs a fixed number of conjugate gradient iterations from
/// v0 = 0 with no tolerance-based early exit, yielding a fixed approximation
/// of M^{-1}. Both are immutable once built and safe for concurrent solves.
class SpdSolver final : public SpdMap {
 public:
  /// Throws FactorizationError naming the pivot row if M is not positive
  /// definite.
  static SpdSolver factorize(const SparseSpd& m);
  static SpdSolver inner_cg(SparseSpd m, int k_inner);

  using SpdMap::solve;
  SpdSolverMode mode() const noexcept { return mode_; }
  int inner_iterations() const noexcept { return k_inner_; }
  std::size_t dimension() const override { return n_; }
  void solve(std::span<const double> p, std::span<double> v) const override;

 private:
  SpdSolver() = default;
  void solve_cholesky(std::span<const double> p, std::span<double> v) const;
  void solve_cg(std::span<const double> p, std::span<double> v) const;

  SpdSolverMode mode_ = SpdSolverMode::direct_cholesky;
  std::size_t n_ = 0;
  int k_inner_ = 0;

  // envelope factor: row i occupies columns first_col_[i] .. i
  std::vector<std::size_t> first_col_;
  std::vector<std::size_t> env_start_;
  std::vector<double> env_;

  SparseSpd m_;  // retained for the inner-CG mode
};

}  // namespace mlsqr
