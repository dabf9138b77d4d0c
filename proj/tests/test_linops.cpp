#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mlsqr/kernels.hpp"
#include "mlsqr/linop.hpp"
#include "support/oracles.hpp"

using namespace mlsqr;

TEST_CASE("identity operator passes vectors through") {
  IdentityOperator id(3);
  const std::vector<double> x{1.0, 2.0, 3.0};
  CHECK(mlsqr::apply(id, x) == x);
  CHECK(mlsqr::apply_adjoint(id, x) == x);
}

TEST_CASE("dense 2x2 operator, hand arithmetic") {
  DenseOperator a(2, 2, {1.0, 2.0, 3.0, 4.0});
  const std::vector<double> ax = mlsqr::apply(a, std::vector<double>{1.0, 1.0});
  CHECK(ax[0] == 3.0);
  CHECK(ax[1] == 7.0);
  const std::vector<double> aty = mlsqr::apply_adjoint(a, std::vector<double>{1.0, 0.0});
  CHECK(aty[0] == 1.0);
  CHECK(aty[1] == 2.0);
}

TEST_CASE("adjoint entry identity on small dense instances") {
  std::mt19937_64 rng(42);
  const auto data = oracles::random_dense(rng, 5, 4);
  DenseOperator a(5, 4, data);
  std::vector<double> ei(4, 0.0), ej(5, 0.0);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      ei[i] = 1.0;
      ej[j] = 1.0;
      const auto aei = mlsqr::apply(a, ei);
      const auto atej = mlsqr::apply_adjoint(a, ej);
      const double lhs = kernels::dot(aei.data(), ej.data(), 5);
      const double rhs = kernels::dot(ei.data(), atej.data(), 4);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
      ei[i] = 0.0;
      ej[j] = 0.0;
    }
  }
}

TEST_CASE("dimension mismatch is a usage error") {
  DenseOperator a(2, 3, std::vector<double>(6, 1.0));
  CHECK_THROWS_AS(mlsqr::apply(a, std::vector<double>{1.0, 2.0}), DimensionError);
  CHECK_THROWS_AS(mlsqr::apply_adjoint(a, std::vector<double>{1.0, 2.0, 3.0}), DimensionError);
}

TEST_CASE("gaussian kernel construction validates its inputs") {
  CHECK_THROWS(make_gaussian_convolution(512, -0.1));
  CHECK_THROWS(make_gaussian_convolution(512, 0.0));
  CHECK_THROWS(make_gaussian_convolution(1, 0.1));
}

TEST_CASE("matrix-free convolution equals its dense realization") {
  const GaussianConvolution1D conv(64, 0.05);
  // dense quadrature matrix built independently of the taps machinery
  const std::size_t n = 64;
  const double h = 1.0 / 64.0;
  const double sigma = 0.05;
  const double norm = std::sqrt(2.0 / (M_PI * sigma * sigma));
  const double radius = std::ceil(6.0 * sigma / h);
  std::vector<double> dense(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double steps =
          std::abs(static_cast<double>(i) - static_cast<double>(j));
      if (steps <= radius) {
        const double d = steps * h;
        dense[i * n + j] = h * norm * std::exp(-d * d / (2.0 * sigma * sigma));
      }
    }
  }
  std::mt19937_64 rng(5);
  const auto x = oracles::random_vector(rng, n);
  const auto y = conv.apply(x);
  std::vector<double> y_ref(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) y_ref[i] += dense[i * n + j] * x[j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(y[i] == doctest::Approx(y_ref[i]).epsilon(1e-13));
  }
}

TEST_CASE("convolution matrix is exactly symmetric") {
  const GaussianConvolution1D conv(48, 0.07);
  const auto dense = oracles::densify(conv);
  for (std::size_t i = 0; i < 48; ++i) {
    for (std::size_t j = 0; j < 48; ++j) {
      CHECK(dense[i * 48 + j] == dense[j * 48 + i]);
    }
  }
}

TEST_CASE("row-normalized convolution preserves constants exactly") {
  const GaussianConvolution1D conv(128, 0.03, 1.0, /*row_normalize=*/true);
  const std::vector<double> ones(128, 1.0);
  const auto y = conv.apply(ones);
  // brute-force row sums of the normalized matrix are 1 by construction
  for (double v : y) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("unnormalized kernel mass approaches the continuum value interior") {
  // the integral of the reference kernel formula is 2
  const GaussianConvolution1D conv(256, 0.03);
  const std::vector<double> ones(256, 1.0);
  const auto y = conv.apply(ones);
  CHECK(y[128] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("large-sigma smoothing limit matches the dense matrix") {
  // sigma comparable to the domain: every output is a near-uniform average
  const GaussianConvolution1D conv(32, 0.8);
  std::mt19937_64 rng(17);
  const auto x = oracles::random_vector(rng, 32);
  const auto dense = oracles::densify(conv);
  const auto y = conv.apply(x);
  for (std::size_t i = 0; i < 32; ++i) {
    double ref = 0.0;
    for (std::size_t j = 0; j < 32; ++j) ref += dense[i * 32 + j] * x[j];
    CHECK(y[i] == doctest::Approx(ref).epsilon(1e-13));
  }
  // and the outputs vary slowly
  for (std::size_t i = 1; i < 32; ++i) {
    CHECK(std::abs(y[i] - y[i - 1]) < 0.05 * (1.0 + std::abs(y[i])));
  }
}

TEST_CASE("apply is linear") {
  const GaussianConvolution1D conv(96, 0.04);
  std::mt19937_64 rng(23);
  const auto x = oracles::random_vector(rng, 96);
  const auto y = oracles::random_vector(rng, 96);
  const double alpha = 0.7, beta = -2.3;
  std::vector<double> combo(96);
  for (std::size_t i = 0; i < 96; ++i) combo[i] = alpha * x[i] + beta * y[i];
  const auto lhs = conv.apply(combo);
  const auto ax = conv.apply(x);
  const auto ay = conv.apply(y);
  for (std::size_t i = 0; i < 96; ++i) {
    CHECK(lhs[i] == doctest::Approx(alpha * ax[i] + beta * ay[i]).epsilon(1e-12));
  }
}

TEST_CASE("adjoint probe on shipped operators") {
  CHECK(adjoint_probe(IdentityOperator(40), 16, 1) <= 1e-15);
  CHECK(adjoint_probe(GaussianConvolution1D(64, 0.05), 16, 2) <= 1e-13);
  CHECK(adjoint_probe(GaussianConvolution1D(64, 0.05, 1.0, true), 16, 3) <= 1e-12);
  CHECK(adjoint_probe(SeparableGaussianBlur2D(16, 16, 0.08), 16, 4) <= 1e-12);
  std::mt19937_64 rng(9);
  CHECK(adjoint_probe(DenseOperator(20, 13, oracles::random_dense(rng, 20, 13)), 16, 5) <=
        1e-12);
}

namespace {

// adjoint deliberately shifted by one sample
class BrokenAdjointOperator final : public LinearOperator {
 public:
  explicit BrokenAdjointOperator(std::size_t n) : LinearOperator({n, n}) {}

 private:
  void do_apply(std::span<const double> x, std::span<double> y) const override {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i];
  }
  void do_apply_adjoint(std::span<const double> y, std::span<double> x) const override {
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[(i + 1) % y.size()];
  }
};

}  // namespace

TEST_CASE("adjoint probe flags a broken adjoint") {
  CHECK(adjoint_probe(BrokenAdjointOperator(32), 8, 7) > 1e-6);
}

TEST_CASE("2D separable blur equals the Kronecker-product matrix") {
  const SeparableGaussianBlur2D blur(16, 16, 0.1);
  const auto kx = oracles::densify(blur.kernel_x());
  const auto ky = oracles::densify(blur.kernel_y());
  std::mt19937_64 rng(31);
  const auto f = oracles::random_vector(rng, 256);
  // reference: (Ky (x) Kx) f with x fastest
  std::vector<double> ref(256, 0.0);
  for (std::size_t iy = 0; iy < 16; ++iy) {
    for (std::size_t ix = 0; ix < 16; ++ix) {
      double acc = 0.0;
      for (std::size_t jy = 0; jy < 16; ++jy) {
        for (std::size_t jx = 0; jx < 16; ++jx) {
          acc += ky[iy * 16 + jy] * kx[ix * 16 + jx] * f[jy * 16 + jx];
        }
      }
      ref[iy * 16 + ix] = acc;
    }
  }
  const auto y = blur.apply(f);
  CHECK(oracles::rel_distance(y, ref) <= 1e-12);
}
