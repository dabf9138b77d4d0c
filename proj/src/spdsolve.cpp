#include "mlsqr/spdsolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlsqr/kernels.hpp"

namespace mlsqr {

std::vector<double> SpdMap::solve(std::span<const double> p) const {
  std::vector<double> v(dimension());
  solve(p, v);
  return v;
}

void IdentityMap::solve(std::span<const double> p, std::span<double> v) const {
  if (p.size() != n_ || v.size() != n_) throw DimensionError("identity map dimension mismatch");
  std::copy(p.begin(), p.end(), v.begin());
}

SpdSolver SpdSolver::factorize(const SparseSpd& m) {
  const std::size_t n = m.dimension();
  SpdSolver s;
  s.mode_ = SpdSolverMode::direct_cholesky;
  s.n_ = n;

  // Envelope profile: first stored column per row. Symmetry of the pattern
  // makes the column profile equal to the row profile.
  s.first_col_.resize(n);
  const auto offsets = m.row_offsets();
  const auto cols = m.col_indices();
  const auto vals = m.values();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t first = i;
    if (offsets[i] < offsets[i + 1]) first = std::min(first, cols[offsets[i]]);
    s.first_col_[i] = first;
  }
  s.env_start_.resize(n + 1);
  s.env_start_[0] = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s.env_start_[i + 1] = s.env_start_[i] + (i - s.first_col_[i] + 1);
  }
  s.env_.assign(s.env_start_[n], 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      if (cols[k] <= i) s.env_[s.env_start_[i] + (cols[k] - s.first_col_[i])] = vals[k];
    }
  }

  // In-place skyline Cholesky M = L L^T.
  double* env = s.env_.data();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t fi = s.first_col_[i];
    double* row_i = env + s.env_start_[i];
    for (std::size_t j = fi; j <= i; ++j) {
      const std::size_t fj = s.first_col_[j];
      const double* row_j = env + s.env_start_[j];
      const std::size_t lo = std::max(fi, fj);
      const std::size_t len = j > lo ? j - lo : 0;
      double sum = row_i[j - fi];
      if (len > 0) sum -= kernels::dot(row_i + (lo - fi), row_j + (lo - fj), len);
      if (j < i) {
        row_i[j - fi] = sum / row_j[j - fj];
      } else {
        if (!(sum > 0.0)) {
          throw FactorizationError(
              "matrix is not positive definite: nonpositive pivot at row " + std::to_string(i),
              i);
        }
        row_i[j - fi] = std::sqrt(sum);
      }
    }
  }
  return s;
}

SpdSolver SpdSolver::inner_cg(SparseSpd m, int k_inner) {
  if (k_inner < 1) throw std::invalid_argument("inner CG needs k_inner >= 1");
  SpdSolver s;
  s.mode_ = SpdSolverMode::inner_cg;
  s.n_ = m.dimension();
  s.k_inner_ = k_inner;
  s.m_ = std::move(m);
  return s;
}

void SpdSolver::solve(std::span<const double> p, std::span<double> v) const {
  if (p.size() != n_ || v.size() != n_) throw DimensionError("solve dimension mismatch");
  if (mode_ == SpdSolverMode::direct_cholesky) {
    solve_cholesky(p, v);
  } else {
    solve_cg(p, v);
  }
}

void SpdSolver::solve_cholesky(std::span<const double> p, std::span<double> v) const {
  const double* env = env_.data();
  // forward substitution L z = p
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t fi = first_col_[i];
    const double* row_i = env + env_start_[i];
    double sum = p[i];
    if (i > fi) sum -= kernels::dot(row_i, v.data() + fi, i - fi);
    v[i] = sum / row_i[i - fi];
  }
  // back substitution L^T v = z, column-oriented over the envelope
  for (std::size_t ii = n_; ii-- > 0;) {
    const std::size_t fi = first_col_[ii];
    const double* row_i = env + env_start_[ii];
    v[ii] /= row_i[ii - fi];
    if (ii > fi) kernels::axpy(-v[ii], row_i, v.data() + fi, ii - fi);
  }
}

void SpdSolver::solve_cg(std::span<const double> p, std::span<double> v) const {
  // Exactly k_inner iterations from v0 = 0. The only early exits are on
  // exactly zero residual or curvature, where the iteration is already at
  // the exact solution of that Krylov subproblem.
  std::fill(v.begin(), v.end(), 0.0);
  std::vector<double> r(p.begin(), p.end());
  std::vector<double> d(r);
  std::vector<double> q(n_);
  double rho = kernels::dot(r.data(), r.data(), n_);
  for (int it = 0; it < k_inner_; ++it) {
    if (rho == 0.0) break;
    m_.multiply(d, q);
    const double curv = kernels::dot(d.data(), q.data(), n_);
    if (curv == 0.0) break;
    const double gamma = rho / curv;
    kernels::axpy(gamma, d.data(), v.data(), n_);
    kernels::axpy(-gamma, q.data(), r.data(), n_);
    const double rho_next = kernels::dot(r.data(), r.data(), n_);
    kernels::xpby(r.data(), rho_next / rho, d.data(), n_);
    rho = rho_next;
  }
}

}  // namespace mlsqr
