#include "mlsqr/linop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "mlsqr/kernels.hpp"

namespace mlsqr {

namespace {

void check_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(want) + ", got " + std::to_string(got));
  }
}

}  // namespace

LinearOperator::LinearOperator(OperatorShape s) : shape_(s) {
  if (s.n_rows < 1 || s.n_cols < 1) {
    throw DimensionError("operator shape must be at least 1x1");
  }
}

void LinearOperator::apply(std::span<const double> x, std::span<double> y) const {
  check_length(x.size(), n_cols(), "apply input");
  check_length(y.size(), n_rows(), "apply output");
  do_apply(x, y);
}

void LinearOperator::apply_adjoint(std::span<const double> y, std::span<double> x) const {
  check_length(y.size(), n_rows(), "apply_adjoint input");
  check_length(x.size(), n_cols(), "apply_adjoint output");
  do_apply_adjoint(y, x);
}

std::vector<double> LinearOperator::apply(std::span<const double> x) const {
  std::vector<double> y(n_rows());
  apply(x, y);
  return y;
}

std::vector<double> LinearOperator::apply_adjoint(std::span<const double> y) const {
  std::vector<double> x(n_cols());
  apply_adjoint(y, x);
  return x;
}

IdentityOperator::IdentityOperator(std::size_t n) : LinearOperator({n, n}) {}

void IdentityOperator::do_apply(std::span<const double> x, std::span<double> y) const {
  std::copy(x.begin(), x.end(), y.begin());
}

void IdentityOperator::do_apply_adjoint(std::span<const double> y, std::span<double> x) const {
  std::copy(y.begin(), y.end(), x.begin());
}

DenseOperator::DenseOperator(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : LinearOperator({rows, cols}), data_(std::move(row_major)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("dense operator storage does not match rows*cols");
  }
}

void DenseOperator::do_apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t cols = n_cols();
  for (std::size_t i = 0; i < n_rows(); ++i) {
    y[i] = kernels::dot(data_.data() + i * cols, x.data(), cols);
  }
}

void DenseOperator::do_apply_adjoint(std::span<const double> y, std::span<double> x) const {
  const std::size_t cols = n_cols();
  std::fill(x.begin(), x.end(), 0.0);
  for (std::size_t i = 0; i < n_rows(); ++i) {
    kernels::axpy(y[i], data_.data() + i * cols, x.data(), cols);
  }
}

GaussianConvolution1D::GaussianConvolution1D(std::size_t n, double sigma_f,
                                             double domain_length, bool row_normalize)
    : LinearOperator({n, n}), n_(n), normalized_(row_normalize) {
  if (n < 2) throw DimensionError("convolution grid needs at least 2 samples");
  if (!(sigma_f > 0.0)) throw std::invalid_argument("sigma_f must be positive");
  if (!(domain_length > 0.0)) throw std::invalid_argument("domain length must be positive");

  h_ = domain_length / static_cast<double>(n);
  // Truncation at 6 sigma keeps the dropped kernel mass below 1e-8 and the
  // apply cost O(n * sigma / h).
  radius_ = static_cast<std::size_t>(std::ceil(6.0 * sigma_f / h_));
  const double norm = std::sqrt(2.0 / (M_PI * sigma_f * sigma_f));
  taps_.resize(2 * radius_ + 1);
  for (std::size_t k = 0; k < taps_.size(); ++k) {
    const double d = (static_cast<double>(k) - static_cast<double>(radius_)) * h_;
    taps_[k] = h_ * norm * std::exp(-d * d / (2.0 * sigma_f * sigma_f));
  }
  if (normalized_) {
    row_scale_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t lo = i >= radius_ ? i - radius_ : 0;
      const std::size_t hi = std::min(n_ - 1, i + radius_);
      double sum = 0.0;
      for (std::size_t j = lo; j <= hi; ++j) sum += taps_[radius_ + j - i];
      row_scale_[i] = 1.0 / sum;
    }
  }
}

void GaussianConvolution1D::convolve(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i >= radius_ ? i - radius_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + radius_);
    y[i] = kernels::dot(taps_.data() + (radius_ + lo - i), x.data() + lo, hi - lo + 1);
  }
}

void GaussianConvolution1D::do_apply(std::span<const double> x, std::span<double> y) const {
  // A = D C with C the symmetric truncated-kernel matrix and D the row
  // scaling (identity unless normalized).
  convolve(x, y);
  if (normalized_) {
    for (std::size_t i = 0; i < n_; ++i) y[i] *= row_scale_[i];
  }
}

void GaussianConvolution1D::do_apply_adjoint(std::span<const double> y, std::span<double> x) const {
  if (normalized_) {
    std::vector<double> scaled(n_);
    for (std::size_t i = 0; i < n_; ++i) scaled[i] = y[i] * row_scale_[i];
    convolve(scaled, x);
  } else {
    convolve(y, x);  // C = C^T on the uniform grid
  }
}

SeparableGaussianBlur2D::SeparableGaussianBlur2D(std::size_t nx, std::size_t ny, double sigma_f)
    : LinearOperator({nx * ny, nx * ny}),
      nx_(nx),
      ny_(ny),
      kx_(nx, sigma_f, 1.0),
      ky_(ny, sigma_f, 1.0) {
  if (nx < 2 || ny < 2) throw DimensionError("blur grid needs at least 2x2 samples");
}

void SeparableGaussianBlur2D::blur(std::span<const double> in, std::span<double> out) const {
  // rows first (x direction, contiguous), then columns
  for (std::size_t j = 0; j < ny_; ++j) {
    kx_.apply(in.subspan(j * nx_, nx_), out.subspan(j * nx_, nx_));
  }
  std::vector<double> col(ny_), conv(ny_);
  for (std::size_t i = 0; i < nx_; ++i) {
    for (std::size_t j = 0; j < ny_; ++j) col[j] = out[j * nx_ + i];
    ky_.apply(col, conv);
    for (std::size_t j = 0; j < ny_; ++j) out[j * nx_ + i] = conv[j];
  }
}

void SeparableGaussianBlur2D::do_apply(std::span<const double> x, std::span<double> y) const {
  blur(x, y);
}

void SeparableGaussianBlur2D::do_apply_adjoint(std::span<const double> y, std::span<double> x) const {
  blur(y, x);  // both 1D factors are symmetric
}

GaussianConvolution1D make_gaussian_convolution(std::size_t n, double sigma_f,
                                                double domain_length) {
  return GaussianConvolution1D(n, sigma_f, domain_length);
}

std::vector<double> apply(const LinearOperator& op, std::span<const double> x) {
  return op.apply(x);
}

std::vector<double> apply_adjoint(const LinearOperator& op, std::span<const double> y) {
  return op.apply_adjoint(y);
}

double adjoint_probe(const LinearOperator& op, int n_probes, std::uint64_t seed) {
  if (n_probes < 1) throw std::invalid_argument("adjoint_probe needs n_probes >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst = 0.0;
  std::vector<double> x(op.n_cols()), y(op.n_rows());
  std::vector<double> ax(op.n_rows()), aty(op.n_cols());
  for (int p = 0; p < n_probes; ++p) {
    for (auto& v : x) v = unif(rng);
    for (auto& v : y) v = unif(rng);
    op.apply(x, ax);
    op.apply_adjoint(y, aty);
    const double lhs = kernels::dot(ax.data(), y.data(), ax.size());
    const double rhs = kernels::dot(x.data(), aty.data(), x.size());
    const double scale = kernels::nrm2(ax.data(), ax.size()) * kernels::nrm2(y.data(), y.size()) +
                         std::numeric_limits<double>::epsilon();
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace mlsqr
