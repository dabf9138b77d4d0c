#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mlsqr/diffusion.hpp"
#include "mlsqr/spdsolve.hpp"
#include "support/oracles.hpp"

using namespace mlsqr;

namespace {

double norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

SparseSpd shifted_neumann_laplacian(std::size_t n, double eps) {
  const Grid grid = Grid::line(n, 1.0);
  return assemble_m(grid, std::vector<double>(n, 0.0), PenaltySpec::tikhonov(), eps);
}

}  // namespace

TEST_CASE("1x1 factorization") {
  const SparseSpd m = SparseSpd::from_dense(1, std::vector<double>{4.0});
  const SpdSolver s = SpdSolver::factorize(m);
  CHECK(s.solve(std::vector<double>{8.0})[0] == 2.0);
}

TEST_CASE("identity and diagonal solves") {
  const SpdSolver id = SpdSolver::factorize(SparseSpd::identity(5));
  const std::vector<double> p{1.0, -2.0, 0.0, 3.5, 0.25};
  CHECK(id.solve(p) == p);

  const SparseSpd diag =
      SparseSpd::from_dense(3, std::vector<double>{1, 0, 0, 0, 2, 0, 0, 0, 4});
  const SpdSolver ds = SpdSolver::factorize(diag);
  const auto v = ds.solve(std::vector<double>{1.0, 2.0, 4.0});
  for (double x : v) CHECK(x == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("zero right-hand side maps to zero") {
  const SparseSpd m = shifted_neumann_laplacian(8, 1e-8);
  const SpdSolver chol = SpdSolver::factorize(m);
  const SpdSolver cg = SpdSolver::inner_cg(m, 4);
  const std::vector<double> zero(8, 0.0);
  CHECK(chol.solve(zero) == zero);
  CHECK(cg.solve(zero) == zero);
}

TEST_CASE("round trip on the shifted Neumann Laplacian") {
  // kappa(M) ~ 4e8 here: the constant mode sits at the 1e-8 shift, so the
  // attainable round-trip accuracy floors out near kappa * eps ~ 1e-7
  const SparseSpd m = shifted_neumann_laplacian(5, 1e-8);
  const SpdSolver s = SpdSolver::factorize(m);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = oracles::random_vector(rng, 5);
    const auto v = s.solve(m.multiply(x));
    CHECK(oracles::rel_distance(v, x) <= 1e-7);
  }
}

TEST_CASE("direct cholesky residual on larger instances") {
  std::mt19937_64 rng(2);
  // 1D chain at dimension 10^4 (zero fill) and a 2D grid with envelope fill;
  // shifts keep kappa moderate so backward stability leaves margin at 1e-10
  const SparseSpd chain = shifted_neumann_laplacian(10000, 1e-3);
  const SparseSpd grid2d = [&] {
    const Grid grid = Grid::plane(50, 40, 0.02);
    const auto f = oracles::random_vector(rng, 2000);
    return assemble_m(grid, f, PenaltySpec::perona_malik_log(0.2), 1e-3);
  }();
  for (const SparseSpd* m : {&chain, &grid2d}) {
    const SpdSolver s = SpdSolver::factorize(*m);
    const auto p = oracles::random_vector(rng, m->dimension());
    const auto v = s.solve(p);
    const auto mv = m->multiply(v);
    std::vector<double> resid(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) resid[i] = mv[i] - p[i];
    CHECK(norm(resid) <= 1e-10 * norm(p));
  }
}

TEST_CASE("dense random SPD round trip") {
  std::mt19937_64 rng(3);
  const auto dense = oracles::random_spd_dense(rng, 40, 2.0);
  const SparseSpd m = SparseSpd::from_dense(40, dense);
  const SpdSolver s = SpdSolver::factorize(m);
  const auto x = oracles::random_vector(rng, 40);
  CHECK(oracles::rel_distance(s.solve(m.multiply(x)), x) <= 1e-10);
}

TEST_CASE("non-SPD matrix reports the failing pivot") {
  // indefinite: second diagonal entry negative
  const SparseSpd bad =
      SparseSpd::from_dense(3, std::vector<double>{2, 0, 0, 0, -1, 0, 0, 0, 2});
  CHECK_THROWS_AS(SpdSolver::factorize(bad), FactorizationError);
  try {
    SpdSolver::factorize(bad);
  } catch (const FactorizationError& e) {
    CHECK(e.pivot_row() == 1);
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("inner CG reaches the exact solve at full iteration count") {
  std::mt19937_64 rng(4);
  const auto dense = oracles::random_spd_dense(rng, 12, 2.0);
  const SparseSpd m = SparseSpd::from_dense(12, dense);
  const SpdSolver cg = SpdSolver::inner_cg(m, 12);
  const SpdSolver chol = SpdSolver::factorize(m);
  const auto p = oracles::random_vector(rng, 12);
  CHECK(oracles::rel_distance(cg.solve(p), chol.solve(p)) <= 1e-9);
}

TEST_CASE("one CG step solves the identity") {
  const SpdSolver cg = SpdSolver::inner_cg(SparseSpd::identity(6), 1);
  const std::vector<double> p{1.0, 2.0, -3.0, 0.0, 5.0, -8.0};
  const auto v = cg.solve(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(v[i] == doctest::Approx(p[i]).epsilon(1e-15));
  }
}

TEST_CASE("inner CG at full count is a linear map") {
  // finite termination makes the k >= n map the exact (linear) inverse
  std::mt19937_64 rng(5);
  const auto dense = oracles::random_spd_dense(rng, 10, 3.0);
  const SparseSpd m = SparseSpd::from_dense(10, dense);
  const SpdSolver cg = SpdSolver::inner_cg(m, 10);
  const auto p = oracles::random_vector(rng, 10);
  const auto q = oracles::random_vector(rng, 10);
  const double alpha = 1.7, beta = -0.4;
  std::vector<double> combo(10);
  for (std::size_t i = 0; i < 10; ++i) combo[i] = alpha * p[i] + beta * q[i];
  const auto lhs = cg.solve(combo);
  const auto vp = cg.solve(p);
  const auto vq = cg.solve(q);
  std::vector<double> rhs(10);
  for (std::size_t i = 0; i < 10; ++i) rhs[i] = alpha * vp[i] + beta * vq[i];
  CHECK(oracles::rel_distance(lhs, rhs) <= 1e-12);
}

TEST_CASE("both modes are symmetric maps") {
  std::mt19937_64 rng(6);
  const auto dense = oracles::random_spd_dense(rng, 14, 2.0);
  const SparseSpd m = SparseSpd::from_dense(14, dense);
  const SpdSolver chol = SpdSolver::factorize(m);
  const SpdSolver cg = SpdSolver::inner_cg(m, 14);  // full count: exact inverse
  for (const SpdMap* s : {static_cast<const SpdMap*>(&chol), static_cast<const SpdMap*>(&cg)}) {
    const auto p = oracles::random_vector(rng, 14);
    const auto q = oracles::random_vector(rng, 14);
    const auto sp = s->solve(p);
    const auto sq = s->solve(q);
    double lhs = 0.0, rhs = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < 14; ++i) {
      lhs += sp[i] * q[i];
      rhs += p[i] * sq[i];
      scale += std::abs(sp[i] * q[i]);
    }
    CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
  }
}

TEST_CASE("truncated inner CG is deterministic, error monotone in k") {
  const SparseSpd m = shifted_neumann_laplacian(64, 1e-6);
  std::mt19937_64 rng(7);
  const auto p = oracles::random_vector(rng, 64);
  const auto exact = SpdSolver::factorize(m).solve(p);
  // the Euclidean *error* decreases monotonically in CG; the Euclidean
  // residual is allowed to oscillate
  double prev_err = norm(exact);
  for (int k : {1, 2, 4, 8, 16, 32, 64}) {
    const SpdSolver cg = SpdSolver::inner_cg(m, k);
    const auto v1 = cg.solve(p);
    const auto v2 = cg.solve(p);
    CHECK(v1 == v2);  // bitwise repeatability
    std::vector<double> err(64);
    for (std::size_t i = 0; i < 64; ++i) err[i] = v1[i] - exact[i];
    const double e = norm(err);
    CHECK(e <= prev_err * (1.0 + 1e-10));
    prev_err = e;
  }
}

TEST_CASE("solver rejects mismatched lengths") {
  const SpdSolver s = SpdSolver::factorize(SparseSpd::identity(4));
  CHECK_THROWS_AS(s.solve(std::vector<double>{1.0, 2.0}), DimensionError);
}
