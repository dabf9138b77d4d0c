#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mlsqr/errors.hpp"

namespace mlsqr {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Symmetric positive (semi)definite matrix in CSR layout, storing the full
/// symmetric pattern plus the diagonal shift that was added to it. Immutable
/// after construction and safe to share across threads.
class SparseSpd {
 public:
  SparseSpd() = default;  // empty 0-dimensional matrix

  /// Sums duplicate entries, materializes every diagonal slot, adds `shift`
  /// to the diagonal and verifies the result is exactly symmetric.
  static SparseSpd from_triplets(std::size_t n, std::span<const Triplet> entries,
                                 double shift = 0.0);
  static SparseSpd from_dense(std::size_t n, std::span<const double> row_major,
                              double shift = 0.0);
  static SparseSpd identity(std::size_t n);

  std::size_t dimension() const noexcept { return n_; }
  double shift() const noexcept { return shift_; }
  std::size_t num_nonzeros() const noexcept { return values_.size(); }

  /// y = M x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  /// x^T M x
  double quadratic_form(std::span<const double> x) const;

  double entry(std::size_t i, std::size_t j) const;  // 0 if absent
  double max_diagonal() const;
  double frobenius_norm() const;
  std::vector<double> to_dense() const;  // row-major, small instances only

  /// Same matrix with a different diagonal shift (relative to the unshifted
  /// values, i.e. the stored shift is replaced, not accumulated).
  SparseSpd with_shift(double new_shift) const;

  std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return cols_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t n_ = 0;
  double shift_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

}  // namespace mlsqr
