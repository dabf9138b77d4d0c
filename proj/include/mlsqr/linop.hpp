#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mlsqr/errors.hpp"

namespace mlsqr {

struct OperatorShape {
  std::size_t n_rows = 0;  // data-space dimension
  std::size_t n_cols = 0;  // solution-space dimension
};

/// Matrix-free linear map A : R^{n_cols} -> R^{n_rows}, defined through its
/// action on a vector together with the action of its adjoint. Operators are
/// immutable after construction; apply/apply_adjoint may be called
/// concurrently on the same object.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  LinearOperator(const LinearOperator&) = delete;
  LinearOperator& operator=(const LinearOperator&) = delete;

  const OperatorShape& shape() const noexcept { return shape_; }
  std::size_t n_rows() const noexcept { return shape_.n_rows; }
  std::size_t n_cols() const noexcept { return shape_.n_cols; }

  /// y = A x
  void apply(std::span<const double> x, std::span<double> y) const;
  /// x = A^T y
  void apply_adjoint(std::span<const double> y, std::span<double> x) const;

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_adjoint(std::span<const double> y) const;

 protected:
  explicit LinearOperator(OperatorShape s);

  virtual void do_apply(std::span<const double> x, std::span<double> y) const = 0;
  virtual void do_apply_adjoint(std::span<const double> y, std::span<double> x) const = 0;

 private:
  OperatorShape shape_;
};

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(std::size_t n);

 private:
  void do_apply(std::span<const double> x, std::span<double> y) const override;
  void do_apply_adjoint(std::span<const double> y, std::span<double> x) const override;
};

/// Row-major dense matrix.
class DenseOperator final : public LinearOperator {
 public:
  DenseOperator(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  double entry(std::size_t i, std::size_t j) const { return data_[i * n_cols() + j]; }
  std::span<const double> data() const noexcept { return data_; }

 private:
  void do_apply(std::span<const double> x, std::span<double> y) const override;
  void do_apply_adjoint(std::span<const double> y, std::span<double> x) const override;

  std::vector<double> data_;
};

/// Discretization of the stationary Gaussian convolution on [0, L]:
///
///   A_ij = h * K(|x_i - x_j|),   K(x) = sqrt(2 / (pi s^2)) exp(-x^2 / (2 s^2)),
///
/// on the cell-centered grid x_i = (i + 1/2) h, h = L / n (midpoint
/// quadrature). The kernel is truncated at radius 6 s and extended by zero
/// outside the domain, which makes the matrix exactly symmetric. With
/// `row_normalize` each row is rescaled to unit sum (constant-preservation
/// diagnostic; breaks symmetry near the boundary, the adjoint accounts for
/// that).
class GaussianConvolution1D final : public LinearOperator {
 public:
  GaussianConvolution1D(std::size_t n, double sigma_f, double domain_length = 1.0,
                        bool row_normalize = false);

  double grid_spacing() const noexcept { return h_; }
  std::size_t radius() const noexcept { return radius_; }
  /// Full tap vector t_k = h * K(|k - radius| * h), k = 0 .. 2 * radius.
  std::span<const double> taps() const noexcept { return taps_; }
  bool row_normalized() const noexcept { return normalized_; }

 private:
  void do_apply(std::span<const double> x, std::span<double> y) const override;
  void do_apply_adjoint(std::span<const double> y, std::span<double> x) const override;
  void convolve(std::span<const double> x, std::span<double> y) const;

  std::size_t n_;
  double h_;
  std::size_t radius_;
  std::vector<double> taps_;
  std::vector<double> row_scale_;  // 1 / row sum, only when normalized
  bool normalized_;
};

/// Separable 2D Gaussian blur on the unit square: 1D convolutions along x
/// rows followed by y columns, i.e. the Kronecker product K_y (x) K_x. Nodes
/// are ordered row-major with x fastest.
class SeparableGaussianBlur2D final : public LinearOperator {
 public:
  SeparableGaussianBlur2D(std::size_t nx, std::size_t ny, double sigma_f);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  const GaussianConvolution1D& kernel_x() const noexcept { return kx_; }
  const GaussianConvolution1D& kernel_y() const noexcept { return ky_; }

 private:
  void do_apply(std::span<const double> x, std::span<double> y) const override;
  void do_apply_adjoint(std::span<const double> y, std::span<double> x) const override;
  void blur(std::span<const double> in, std::span<double> out) const;

  std::size_t nx_, ny_;
  GaussianConvolution1D kx_, ky_;
};

GaussianConvolution1D make_gaussian_convolution(std::size_t n, double sigma_f,
                                                double domain_length = 1.0);

// free-function spellings of the operator actions
std::vector<double> apply(const LinearOperator& op, std::span<const double> x);
std::vector<double> apply_adjoint(const LinearOperator& op, std::span<const double> y);

/// Randomized adjoint-consistency probe: draws `n_probes` seeded pairs
/// (x, y) and returns the largest |<Ax, y> - <x, A^T y>| / (|Ax| |y| + eps).
double adjoint_probe(const LinearOperator& op, int n_probes, std::uint64_t seed);

}  // namespace mlsqr
