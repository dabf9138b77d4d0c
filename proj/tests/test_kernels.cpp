#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "mlsqr/kernels.hpp"

using namespace mlsqr;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = unif(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar backend is always available") {
  CHECK(kernels::available(kernels::Backend::scalar));
}

TEST_CASE("simd variants agree with the scalar reference") {
  if (!kernels::available(kernels::Backend::avx2)) {
    MESSAGE("avx2 unavailable on this host, nothing to compare");
    return;
  }
  const kernels::Backend initial = kernels::active();
  std::mt19937_64 rng(7);
  // odd lengths cover the remainder loops
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 64u, 1001u, 4096u}) {
    const auto x = random_vector(rng, n);
    const auto y = random_vector(rng, n);
    const double a = 0.37, b = -1.25;

    REQUIRE(kernels::select(kernels::Backend::scalar));
    const double dot_ref = kernels::dot(x.data(), y.data(), n);
    auto axpy_ref = y;
    kernels::axpy(a, x.data(), axpy_ref.data(), n);
    auto xpby_ref = y;
    kernels::xpby(x.data(), b, xpby_ref.data(), n);
    auto scal_ref = x;
    kernels::scal(a, scal_ref.data(), n);

    REQUIRE(kernels::select(kernels::Backend::avx2));
    const double dot_simd = kernels::dot(x.data(), y.data(), n);
    auto axpy_simd = y;
    kernels::axpy(a, x.data(), axpy_simd.data(), n);
    auto xpby_simd = y;
    kernels::xpby(x.data(), b, xpby_simd.data(), n);
    auto scal_simd = x;
    kernels::scal(a, scal_simd.data(), n);

    const double scale = 1.0 + std::abs(dot_ref);
    CHECK(std::abs(dot_simd - dot_ref) <= 1e-12 * scale * (1.0 + static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(axpy_simd[i] == doctest::Approx(axpy_ref[i]).epsilon(1e-14));
      CHECK(xpby_simd[i] == doctest::Approx(xpby_ref[i]).epsilon(1e-14));
      CHECK(scal_simd[i] == scal_ref[i]);  // one multiply, no reassociation
    }
  }
  kernels::select(initial);
}

TEST_CASE("dot and nrm2 are consistent") {
  std::mt19937_64 rng(11);
  const auto x = random_vector(rng, 129);
  const double n2 = kernels::nrm2(x.data(), x.size());
  CHECK(n2 * n2 == doctest::Approx(kernels::dot(x.data(), x.data(), x.size())).epsilon(1e-14));
}

TEST_CASE("selecting an unavailable backend leaves the current one in place") {
  const kernels::Backend initial = kernels::active();
  if (!kernels::available(kernels::Backend::avx2)) {
    CHECK_FALSE(kernels::select(kernels::Backend::avx2));
    CHECK(kernels::active() == initial);
  }
  CHECK(kernels::select(initial));
}
