#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mlsqr/penalty.hpp"
#include "support/oracles.hpp"

using namespace mlsqr;

namespace {

const std::vector<PenaltySpec> kAllKinds{
    PenaltySpec::tikhonov(),
    PenaltySpec::tv_smoothed(1.0),
    PenaltySpec::tv_smoothed(0.005),
    PenaltySpec::perona_malik_log(1.0),
    PenaltySpec::perona_malik_log(0.005),
    PenaltySpec::perona_malik_exp(1.0),
    PenaltySpec::perona_malik_exp(0.3),
};

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> grid;
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) grid.push_back(lo * std::exp(step * i));
  return grid;
}

}  // namespace

TEST_CASE("r values at pinned points") {
  CHECK(r_value(PenaltySpec::tikhonov(), 2.0) == 2.0);
  CHECK(r_value(PenaltySpec::tv_smoothed(1.0), 0.0) == 1.0);
  CHECK(r_value(PenaltySpec::perona_malik_log(0.005), 0.0) == 0.0);
  CHECK(r_value(PenaltySpec::perona_malik_exp(0.7), 0.0) == 0.0);
}

TEST_CASE("r derivatives at pinned points") {
  CHECK(r_deriv(PenaltySpec::tikhonov(), 3.0) == 3.0);
  CHECK(r_deriv(PenaltySpec::perona_malik_log(1.0), 1.0) == 0.5);
}

TEST_CASE("diffusivity values and limits") {
  CHECK(diffusivity(PenaltySpec::tikhonov(), 0.0) == 1.0);
  CHECK(diffusivity(PenaltySpec::tikhonov(), 123.4) == 1.0);
  CHECK(diffusivity(PenaltySpec::perona_malik_log(1.0), 1.0) == 0.5);
  CHECK(diffusivity(PenaltySpec::tv_smoothed(0.25), 0.0) == doctest::Approx(4.0));
  CHECK(diffusivity(PenaltySpec::perona_malik_log(0.1), 0.0) == 1.0);
  CHECK(diffusivity(PenaltySpec::perona_malik_exp(0.1), 0.0) == 1.0);
}

TEST_CASE("smoothed TV diffusivity decays like 1/t") {
  const PenaltySpec tv = PenaltySpec::tv_smoothed(1.0);
  const double t = 1e6;
  const double expected = 1.0 / (1.0 * std::sqrt(1.0 + (t / 1.0) * (t / 1.0)));
  CHECK(diffusivity(tv, t) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(diffusivity(tv, t) == doctest::Approx(1.0 / t).epsilon(1e-6));
}

TEST_CASE("negative arguments are rejected") {
  for (const auto& spec : kAllKinds) {
    CHECK_THROWS_AS(r_value(spec, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(r_deriv(spec, -1e-9), std::invalid_argument);
  }
}

TEST_CASE("spec validation") {
  CHECK_THROWS(PenaltySpec::tv_smoothed(0.0).validate());
  CHECK_THROWS(PenaltySpec::perona_malik_log(-1.0).validate());
  CHECK_NOTHROW(PenaltySpec::tikhonov().validate());
  PenaltySpec bad = PenaltySpec::tikhonov();
  bad.tau = -1.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("r_deriv equals diffusivity times t exactly") {
  for (const auto& spec : kAllKinds) {
    for (double t : log_grid(1e-8, 1e3, 45)) {
      CHECK(r_deriv(spec, t) == diffusivity(spec, t) * t);
    }
  }
}

TEST_CASE("derivative matches the complex-step oracle over the full grid") {
  for (const auto& spec : kAllKinds) {
    for (double t : log_grid(1e-8, 1e3, 60)) {
      const double ref = oracles::complex_step_deriv(spec, t);
      const double got = r_deriv(spec, t);
      // absolute floor guards PM-exp far in its exponential tail
      const double tol = 1e-6 * std::max(std::abs(ref), 1e-280);
      CHECK(std::abs(got - ref) <= tol);
    }
  }
}

TEST_CASE("derivative matches central finite differences where they are well posed") {
  // FD on r itself is accurate once t is large enough that rounding in
  // r(t +- delta) stays below the directional change
  for (const auto& spec : kAllKinds) {
    for (double t : log_grid(1e-3, 1e3, 30)) {
      const double step = 1e-6 * t;
      const double fd = oracles::central_diff(spec, t, step);
      const double got = r_deriv(spec, t);
      const double scale = std::max(std::abs(fd), std::abs(got));
      // second term: cancellation noise of the difference quotient itself
      const double tol = 2e-5 * scale +
                         8.0 * std::numeric_limits<double>::epsilon() *
                             r_value(spec, t) / step;
      if (scale == 0.0 && r_value(spec, t) == 0.0) continue;
      CHECK(std::abs(got - fd) <= tol);
    }
  }
}

TEST_CASE("diffusivity is strictly positive and finite") {
  for (const auto& spec : kAllKinds) {
    for (double t : log_grid(1e-12, 1e9, 80)) {
      const double c = diffusivity(spec, t);
      CHECK(c > 0.0);
      CHECK(std::isfinite(c));
    }
    CHECK(diffusivity(spec, 0.0) > 0.0);
  }
}

TEST_CASE("diffusivity is nonincreasing (constant for tikhonov)") {
  for (const auto& spec : kAllKinds) {
    double prev = diffusivity(spec, 0.0);
    for (double t : log_grid(1e-10, 1e8, 100)) {
      const double c = diffusivity(spec, t);
      if (spec.kind == PenaltyKind::tikhonov) {
        CHECK(c == 1.0);
      } else {
        CHECK(c <= prev * (1.0 + 1e-15));
      }
      prev = c;
    }
  }
}
