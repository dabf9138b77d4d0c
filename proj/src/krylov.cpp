#include "mlsqr/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mlsqr/kernels.hpp"

namespace mlsqr {

namespace {

using kernels::axpy;
using kernels::dot;
using kernels::nrm2;
using kernels::scal;
using kernels::xpby;

// Scalar part of the damped LSQR recurrence, shared by the three
// bidiagonalization-based solvers. Damping with sqrt(tau) is folded in by an
// extra plane rotation per iteration, so a single bidiagonalization serves
// every tau. Norm estimates follow Paige & Saunders.
class LsqrRecurrence {
 public:
  LsqrRecurrence(double alpha1, double beta1, double tau)
      : tau_(tau),
        damp_(std::sqrt(tau)),
        alpha_cur_(alpha1),
        phibar_(beta1),
        rhobar_(alpha1),
        bnorm_(beta1),
        rnorm_(beta1) {}

  struct Step {
    double sol_coeff;  // phi_i / rho_i
    double dir_coeff;  // theta_{i+1} / rho_i
  };

  Step advance(double beta_next, double alpha_next, double wnorm2) {
    anorm2_ += alpha_cur_ * alpha_cur_ + beta_next * beta_next + tau_;

    // rotation eliminating the damping row
    double rhobar1 = rhobar_;
    double psi = 0.0;
    if (damp_ > 0.0) {
      rhobar1 = std::hypot(rhobar_, damp_);
      const double cs1 = rhobar_ / rhobar1;
      psi = (damp_ / rhobar1) * phibar_;
      phibar_ = cs1 * phibar_;
    }

    // rotation eliminating the subdiagonal beta
    const double rho = std::hypot(rhobar1, beta_next);
    const double cs = rhobar1 / rho;
    const double sn = beta_next / rho;
    const double theta = sn * alpha_next;
    rhobar_ = -cs * alpha_next;
    const double phi = cs * phibar_;
    phibar_ = sn * phibar_;

    ddnorm_ += wnorm2 / (rho * rho);

    // solution norm estimate
    const double delta = sn2_ * rho;
    const double gambar = -cs2_ * rho;
    const double rhs = phi - delta * z_;
    const double zbar = rhs / gambar;
    xnorm_ = std::sqrt(xxnorm_ + zbar * zbar);
    const double gamma = std::hypot(gambar, theta);
    cs2_ = gambar / gamma;
    sn2_ = theta / gamma;
    z_ = rhs / gamma;
    xxnorm_ += z_ * z_;

    res2_ += psi * psi;
    rnorm_ = std::sqrt(phibar_ * phibar_ + res2_);
    arnorm_ = alpha_next * std::abs(sn * phi);
    alpha_cur_ = alpha_next;
    return {phi / rho, theta / rho};
  }

  double rnorm() const { return rnorm_; }
  double arnorm() const { return arnorm_; }
  double anorm() const { return std::sqrt(anorm2_); }
  double acond() const { return anorm() * std::sqrt(ddnorm_); }
  double xnorm() const { return xnorm_; }
  double bnorm() const { return bnorm_; }
  double tau() const { return tau_; }

 private:
  double tau_;
  double damp_;
  double alpha_cur_;
  double phibar_;
  double rhobar_;
  double bnorm_;
  double rnorm_;
  double arnorm_ = 0.0;
  double anorm2_ = 0.0;
  double ddnorm_ = 0.0;
  double res2_ = 0.0;
  double cs2_ = -1.0;
  double sn2_ = 0.0;
  double z_ = 0.0;
  double xxnorm_ = 0.0;
  double xnorm_ = 0.0;
};

double distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double exact_data_residual(const LinearOperator& a, std::span<const double> f,
                           std::span<const double> g, std::vector<double>& scratch) {
  a.apply(f, scratch);
  return distance(g, scratch);
}

// Shared per-iteration bookkeeping for the bidiagonalization solvers.
struct IterationOutcome {
  bool stop = false;
  StopReason reason = StopReason::max_iters;
};

IterationOutcome finish_iteration(
    int iter, const LsqrRecurrence& rec, double beta, double alpha_next, bool breakdown,
    const StoppingConfig& stop, const SolveOptions& opts, SolveResult& result,
    std::span<const double> f, std::span<const double> g, const LinearOperator& a,
    std::vector<double>& scratch_rows) {
  IterationRecord rec_row;
  rec_row.iteration = iter;
  rec_row.res_damped = rec.rnorm();
  if (rec.tau() == 0.0) {
    rec_row.res_data = rec.rnorm();
    rec_row.res_data_exact = true;
  } else if (stop.use_s4) {
    rec_row.res_data = exact_data_residual(a, f, g, scratch_rows);
    rec_row.res_data_exact = true;
  } else {
    // |rbar|^2 = |g - A f|^2 + tau |x|^2 with |x| estimated
    const double est = rec.rnorm() * rec.rnorm() - rec.tau() * rec.xnorm() * rec.xnorm();
    rec_row.res_data = std::sqrt(std::max(est, 0.0));
    rec_row.res_data_exact = false;
  }
  const double den = rec.anorm() * rec.rnorm();
  rec_row.s2_value = den > 0.0 ? rec.arnorm() / den : 0.0;
  rec_row.anorm_est = rec.anorm();
  rec_row.cond_est = rec.acond();
  rec_row.xnorm_est = rec.xnorm();
  rec_row.alpha = alpha_next;
  rec_row.beta = beta;
  result.trace.iterations.push_back(rec_row);
  if (opts.record_snapshots) {
    result.trace.snapshots.emplace_back(f.begin(), f.end());
  }
  result.iterations = iter;

  StoppingState state;
  state.rbar_norm = rec.rnorm();
  state.atrbar_norm = rec.arnorm();
  state.anorm = rec.anorm();
  state.acond = rec.acond();
  state.xnorm = rec.xnorm();
  state.bnorm = rec.bnorm();
  state.data_res = rec_row.res_data;
  state.iteration = iter;
  if (auto fired = evaluate_stopping(state, stop)) {
    return {true, *fired};
  }
  if (breakdown) {
    return {true, StopReason::breakdown};
  }
  return {false, StopReason::max_iters};
}

void trim_bidiag(BidiagEntries& bd, int iterations) {
  const std::size_t i = static_cast<std::size_t>(iterations);
  if (bd.alphas.size() > i) bd.alphas.resize(i);
  if (bd.basis.size() > i) bd.basis.resize(i);
}

}  // namespace

StoppingConfig StoppingConfig::max_iterations(int n) {
  StoppingConfig c;
  c.max_iters = n;
  c.validate();
  return c;
}

StoppingConfig StoppingConfig::discrepancy(double delta, double eta, int max_iters) {
  StoppingConfig c;
  c.delta = delta;
  c.eta = eta;
  c.max_iters = max_iters;
  c.use_s4 = true;
  c.validate();
  return c;
}

StoppingConfig StoppingConfig::lsqr_classic(double atol, double btol, double conlim,
                                            int max_iters) {
  StoppingConfig c;
  c.atol = atol;
  c.btol = btol;
  c.conlim = conlim;
  c.max_iters = max_iters;
  c.use_s1 = c.use_s2 = c.use_s3 = true;
  c.validate();
  return c;
}

void StoppingConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (use_s4 && !(eta > 1.0)) {
    throw std::invalid_argument("discrepancy stopping needs a safety factor eta > 1");
  }
  if (use_s4 && !(delta >= 0.0)) throw std::invalid_argument("noise level delta must be >= 0");
  if (!(atol >= 0.0) || !(btol >= 0.0)) throw std::invalid_argument("tolerances must be >= 0");
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::s1: return "S1";
    case StopReason::s2: return "S2";
    case StopReason::s3: return "S3";
    case StopReason::s4: return "S4";
    case StopReason::max_iters: return "max_iters";
    case StopReason::breakdown: return "breakdown";
  }
  return "unknown";
}

std::optional<StopReason> evaluate_stopping(const StoppingState& state,
                                            const StoppingConfig& stop) {
  if (stop.use_s4 && state.data_res <= stop.eta * stop.delta) return StopReason::s4;
  if (stop.use_s1 &&
      state.rbar_norm <= stop.btol * state.bnorm + stop.atol * state.anorm * state.xnorm) {
    return StopReason::s1;
  }
  if (stop.use_s2) {
    const double den = state.anorm * state.rbar_norm;
    if (state.atrbar_norm <= stop.atol * den || den == 0.0) return StopReason::s2;
  }
  if (stop.use_s3 && stop.conlim > 0.0 && state.acond >= stop.conlim) return StopReason::s3;
  if (state.iteration >= stop.max_iters) return StopReason::max_iters;
  return std::nullopt;
}

SolveResult lsqr(const LinearOperator& a, std::span<const double> g, double tau,
                 const StoppingConfig& stop, const SolveOptions& opts) {
  stop.validate();
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be nonnegative");
  if (g.size() != a.n_rows()) throw DimensionError("right-hand side length mismatch");
  const std::size_t n = a.n_cols();

  SolveResult result;
  result.solution.assign(n, 0.0);

  const double beta1 = nrm2(g.data(), g.size());
  result.bidiag.betas.push_back(beta1);
  if (beta1 == 0.0) {
    result.stop_reason = StopReason::breakdown;
    return result;
  }
  std::vector<double> u(g.begin(), g.end());
  scal(1.0 / beta1, u.data(), u.size());

  std::vector<double> v = a.apply_adjoint(u);
  const double alpha1 = nrm2(v.data(), v.size());
  if (alpha1 == 0.0) {
    result.stop_reason = StopReason::breakdown;  // x = 0 already least squares
    return result;
  }
  scal(1.0 / alpha1, v.data(), v.size());
  result.bidiag.alphas.push_back(alpha1);
  if (opts.store_basis) {
    result.bidiag.basis.push_back(v);
    result.bidiag.left_basis.push_back(u);
  }

  std::vector<double> w = v;
  std::vector<double>& f = result.solution;
  std::vector<double> tmp_rows(a.n_rows()), tmp_cols(n);

  LsqrRecurrence rec(alpha1, beta1, tau);
  double alpha = alpha1;
  result.stop_reason = StopReason::max_iters;
  for (int iter = 1; iter <= stop.max_iters; ++iter) {
    a.apply(v, tmp_rows);
    xpby(tmp_rows.data(), -alpha, u.data(), u.size());  // u = A v - alpha u
    const double beta = nrm2(u.data(), u.size());
    double alpha_next = 0.0;
    if (beta > 0.0) {
      scal(1.0 / beta, u.data(), u.size());
      a.apply_adjoint(u, tmp_cols);
      xpby(tmp_cols.data(), -beta, v.data(), v.size());  // v = A^T u - beta v
      alpha_next = nrm2(v.data(), v.size());
      if (alpha_next > 0.0) scal(1.0 / alpha_next, v.data(), v.size());
    }
    const bool breakdown = beta == 0.0 || alpha_next == 0.0;

    const double wnorm2 = dot(w.data(), w.data(), w.size());
    const auto step = rec.advance(beta, alpha_next, wnorm2);
    axpy(step.sol_coeff, w.data(), f.data(), f.size());
    xpby(v.data(), -step.dir_coeff, w.data(), w.size());  // w = v - (theta/rho) w
    alpha = alpha_next;

    result.bidiag.betas.push_back(beta);
    if (!breakdown) {
      result.bidiag.alphas.push_back(alpha_next);
      if (opts.store_basis) {
        result.bidiag.basis.push_back(v);
        result.bidiag.left_basis.push_back(u);
      }
    }

    const auto outcome = finish_iteration(iter, rec, beta, alpha_next, breakdown, stop, opts,
                                          result, f, g, a, tmp_rows);
    if (outcome.stop) {
      result.stop_reason = outcome.reason;
      break;
    }
  }
  trim_bidiag(result.bidiag, result.iterations);
  return result;
}

SolveResult mlsqr(const LinearOperator& a, const SpdMap& msolver, std::span<const double> g,
                  double tau, const StoppingConfig& stop, const SolveOptions& opts) {
  stop.validate();
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be nonnegative");
  if (g.size() != a.n_rows()) throw DimensionError("right-hand side length mismatch");
  if (msolver.dimension() != a.n_cols()) {
    throw DimensionError("preconditioner dimension does not match operator columns");
  }
  const std::size_t n = a.n_cols();

  SolveResult result;
  result.solution.assign(n, 0.0);

  const double beta1 = nrm2(g.data(), g.size());
  result.bidiag.betas.push_back(beta1);
  if (beta1 == 0.0) {
    result.stop_reason = StopReason::breakdown;
    return result;
  }
  std::vector<double> u(g.begin(), g.end());
  scal(1.0 / beta1, u.data(), u.size());

  std::vector<double> p = a.apply_adjoint(u);
  std::vector<double> v(n);
  if (nrm2(p.data(), p.size()) == 0.0) {
    result.stop_reason = StopReason::breakdown;
    return result;
  }
  msolver.solve(p, v);
  const double s0 = dot(v.data(), p.data(), n);
  if (!(s0 > 0.0)) {
    throw BreakdownError(
        "nonpositive M-weighted square norm at initialization; the preconditioner map is "
        "not symmetric positive definite",
        0);
  }
  const double alpha1 = std::sqrt(s0);
  scal(1.0 / alpha1, v.data(), n);
  scal(1.0 / alpha1, p.data(), n);
  result.bidiag.alphas.push_back(alpha1);
  if (opts.store_basis) {
    result.bidiag.basis.push_back(v);
    result.bidiag.left_basis.push_back(u);
  }

  std::vector<double> w = v;  // wtilde
  std::vector<double> q = p;  // q = M wtilde, kept for the |w| estimate
  std::vector<double>& f = result.solution;
  std::vector<double> tmp_rows(a.n_rows()), tmp_cols(n);

  LsqrRecurrence rec(alpha1, beta1, tau);
  double alpha = alpha1;
  result.stop_reason = StopReason::max_iters;
  for (int iter = 1; iter <= stop.max_iters; ++iter) {
    a.apply(v, tmp_rows);
    xpby(tmp_rows.data(), -alpha, u.data(), u.size());  // u = A vtilde - alpha u
    const double beta = nrm2(u.data(), u.size());
    double alpha_next = 0.0;
    bool breakdown = true;
    if (beta > 0.0) {
      scal(1.0 / beta, u.data(), u.size());
      a.apply_adjoint(u, tmp_cols);
      xpby(tmp_cols.data(), -beta, p.data(), n);  // p = A^T u - beta p
      if (nrm2(p.data(), n) > 0.0) {
        msolver.solve(p, v);  // vtilde = M^{-1} p, the one solve per iteration
        const double s = dot(v.data(), p.data(), n);
        if (!(s > 0.0)) {
          throw BreakdownError("nonpositive M-weighted square norm at iteration " +
                                   std::to_string(iter) +
                                   "; the preconditioner map is not symmetric positive definite",
                               iter);
        }
        alpha_next = std::sqrt(s);
        scal(1.0 / alpha_next, v.data(), n);
        scal(1.0 / alpha_next, p.data(), n);
        breakdown = false;
      }
    }

    const double wnorm2 = dot(w.data(), q.data(), n);  // wtilde^T M wtilde
    const auto step = rec.advance(beta, alpha_next, wnorm2);
    axpy(step.sol_coeff, w.data(), f.data(), n);
    if (!breakdown) {
      xpby(v.data(), -step.dir_coeff, w.data(), n);  // wtilde = vtilde - (theta/rho) wtilde
      xpby(p.data(), -step.dir_coeff, q.data(), n);  // q tracks M wtilde at no extra solve
      result.bidiag.alphas.push_back(alpha_next);
      if (opts.store_basis) {
        result.bidiag.basis.push_back(v);
        result.bidiag.left_basis.push_back(u);
      }
    } else if (beta > 0.0 && opts.store_basis) {
      result.bidiag.left_basis.push_back(u);
    }
    result.bidiag.betas.push_back(beta);
    alpha = alpha_next;

    const auto outcome = finish_iteration(iter, rec, beta, alpha_next, breakdown, stop, opts,
                                          result, f, g, a, tmp_rows);
    if (outcome.stop) {
      result.stop_reason = outcome.reason;
      break;
    }
  }
  trim_bidiag(result.bidiag, result.iterations);
  return result;
}

std::vector<double> DenseTriangularFactor::solve_upper(std::span<const double> b) const {
  if (b.size() != n) throw DimensionError("triangular solve dimension mismatch");
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t ii = n; ii-- > 0;) {
    const double* row = upper_row_major.data() + ii * n;
    double sum = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) sum -= row[j] * x[j];
    if (row[ii] == 0.0) throw std::invalid_argument("singular triangular factor");
    x[ii] = sum / row[ii];
  }
  return x;
}

std::vector<double> DenseTriangularFactor::solve_upper_transposed(
    std::span<const double> b) const {
  if (b.size() != n) throw DimensionError("triangular solve dimension mismatch");
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = upper_row_major.data() + i * n;
    if (row[i] == 0.0) throw std::invalid_argument("singular triangular factor");
    x[i] /= row[i];
    // column i of R^T below the diagonal is row i of R right of it
    for (std::size_t j = i + 1; j < n; ++j) x[j] -= row[j] * x[i];
  }
  return x;
}

SolveResult lsqr_explicit(const LinearOperator& a, const DenseTriangularFactor& factor,
                          std::span<const double> g, double tau, const StoppingConfig& stop,
                          const SolveOptions& opts) {
  stop.validate();
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be nonnegative");
  if (g.size() != a.n_rows()) throw DimensionError("right-hand side length mismatch");
  if (factor.n != a.n_cols()) throw DimensionError("factor dimension mismatch");
  const std::size_t n = a.n_cols();

  SolveResult result;
  result.solution.assign(n, 0.0);

  const double beta1 = nrm2(g.data(), g.size());
  result.bidiag.betas.push_back(beta1);
  if (beta1 == 0.0) {
    result.stop_reason = StopReason::breakdown;
    return result;
  }
  std::vector<double> u(g.begin(), g.end());
  scal(1.0 / beta1, u.data(), u.size());

  std::vector<double> v = factor.solve_upper_transposed(a.apply_adjoint(u));
  const double alpha1 = nrm2(v.data(), v.size());
  if (alpha1 == 0.0) {
    result.stop_reason = StopReason::breakdown;
    return result;
  }
  scal(1.0 / alpha1, v.data(), v.size());
  result.bidiag.alphas.push_back(alpha1);
  if (opts.store_basis) {
    result.bidiag.basis.push_back(v);
    result.bidiag.left_basis.push_back(u);
  }

  std::vector<double> w = v;
  std::vector<double> fhat(n, 0.0);
  std::vector<double> tmp_rows(a.n_rows());

  LsqrRecurrence rec(alpha1, beta1, tau);
  double alpha = alpha1;
  result.stop_reason = StopReason::max_iters;
  for (int iter = 1; iter <= stop.max_iters; ++iter) {
    a.apply(factor.solve_upper(v), tmp_rows);  // A L^{-1} v
    xpby(tmp_rows.data(), -alpha, u.data(), u.size());
    const double beta = nrm2(u.data(), u.size());
    double alpha_next = 0.0;
    if (beta > 0.0) {
      scal(1.0 / beta, u.data(), u.size());
      std::vector<double> lt = factor.solve_upper_transposed(a.apply_adjoint(u));
      xpby(lt.data(), -beta, v.data(), v.size());  // v = L^{-T} A^T u - beta v
      alpha_next = nrm2(v.data(), v.size());
      if (alpha_next > 0.0) scal(1.0 / alpha_next, v.data(), v.size());
    }
    const bool breakdown = beta == 0.0 || alpha_next == 0.0;

    const double wnorm2 = dot(w.data(), w.data(), w.size());
    const auto step = rec.advance(beta, alpha_next, wnorm2);
    axpy(step.sol_coeff, w.data(), fhat.data(), n);
    xpby(v.data(), -step.dir_coeff, w.data(), w.size());
    alpha = alpha_next;

    result.bidiag.betas.push_back(beta);
    if (!breakdown) {
      result.bidiag.alphas.push_back(alpha_next);
      if (opts.store_basis) {
        result.bidiag.basis.push_back(v);
        result.bidiag.left_basis.push_back(u);
      }
    }

    result.solution = factor.solve_upper(fhat);  // back to original variables
    const auto outcome = finish_iteration(iter, rec, beta, alpha_next, breakdown, stop, opts,
                                          result, result.solution, g, a, tmp_rows);
    if (outcome.stop) {
      result.stop_reason = outcome.reason;
      break;
    }
  }
  trim_bidiag(result.bidiag, result.iterations);
  return result;
}

SolveResult cg_normal(const LinearOperator& a, const SparseSpd& m, double tau,
                      std::span<const double> g, const StoppingConfig& stop,
                      const SolveOptions& opts) {
  stop.validate();
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be nonnegative");
  if (g.size() != a.n_rows()) throw DimensionError("right-hand side length mismatch");
  if (m.dimension() != a.n_cols()) throw DimensionError("regularizer dimension mismatch");
  const std::size_t n = a.n_cols();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  SolveResult result;
  result.solution.assign(n, 0.0);

  std::vector<double> b = a.apply_adjoint(g);
  std::vector<double> r = b;
  std::vector<double> d = r;
  std::vector<double> q(n), tmp_rows(a.n_rows()), mx(n);
  double rho = dot(r.data(), r.data(), n);
  const double nres0 = std::sqrt(rho);
  if (nres0 == 0.0) {
    result.stop_reason = StopReason::breakdown;
    return result;
  }
  std::vector<double>& x = result.solution;

  result.stop_reason = StopReason::max_iters;
  for (int iter = 1; iter <= stop.max_iters; ++iter) {
    // q = (A^T A + tau M) d
    a.apply(d, tmp_rows);
    a.apply_adjoint(tmp_rows, q);
    if (tau > 0.0) {
      m.multiply(d, mx);
      axpy(tau, mx.data(), q.data(), n);
    }
    const double curv = dot(d.data(), q.data(), n);
    if (!(curv > 0.0)) {
      throw BreakdownError("nonpositive curvature at iteration " + std::to_string(iter) +
                               "; the normal-equation matrix is not positive definite",
                           iter);
    }
    const double gamma = rho / curv;
    axpy(gamma, d.data(), x.data(), n);
    axpy(-gamma, q.data(), r.data(), n);
    const double rho_next = dot(r.data(), r.data(), n);

    IterationRecord row;
    row.iteration = iter;
    row.res_data = exact_data_residual(a, x, g, tmp_rows);
    row.res_data_exact = true;
    row.res_damped =
        tau > 0.0 ? std::sqrt(row.res_data * row.res_data + tau * m.quadratic_form(x))
                  : row.res_data;
    row.s2_value = std::sqrt(rho_next) / nres0;  // relative normal-equation residual
    row.anorm_est = nan;
    row.cond_est = nan;
    row.xnorm_est = nrm2(x.data(), n);
    result.trace.iterations.push_back(row);
    if (opts.record_snapshots) result.trace.snapshots.emplace_back(x.begin(), x.end());
    result.iterations = iter;

    if (stop.use_s4 && row.res_data <= stop.eta * stop.delta) {
      result.stop_reason = StopReason::s4;
      break;
    }
    if (stop.use_s2 && row.s2_value <= stop.atol) {
      result.stop_reason = StopReason::s2;
      break;
    }
    if (rho_next == 0.0) {
      result.stop_reason = StopReason::breakdown;
      break;
    }
    if (iter >= stop.max_iters) break;

    xpby(r.data(), rho_next / rho, d.data(), n);
    rho = rho_next;
  }
  return result;
}

std::vector<double> solve_projected(const BidiagEntries& bd, double beta1, double tau) {
  const std::size_t k = bd.alphas.size();
  if (k == 0) throw std::invalid_argument("empty bidiagonalization");
  if (bd.betas.size() < k + 1) {
    throw std::invalid_argument("bidiagonalization needs k+1 betas for k alphas");
  }
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be nonnegative");

  // stacked system [B_k; sqrt(tau) I], (2k+1) x k, solved by Householder QR
  const std::size_t rows = 2 * k + 1;
  std::vector<double> mat(rows * k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    mat[j * k + j] = bd.alphas[j];
    mat[(j + 1) * k + j] = bd.betas[j + 1];
    mat[(k + 1 + j) * k + j] = std::sqrt(tau);
  }
  std::vector<double> rhs(rows, 0.0);
  rhs[0] = beta1;

  double col_scale = 0.0;
  for (double v : mat) col_scale = std::max(col_scale, std::abs(v));
  const double rank_tol = col_scale * 1e-14;

  for (std::size_t j = 0; j < k; ++j) {
    double norm2 = 0.0;
    for (std::size_t i = j; i < rows; ++i) norm2 += mat[i * k + j] * mat[i * k + j];
    const double norm = std::sqrt(norm2);
    if (norm <= rank_tol) continue;  // dependent column; its coefficient stays 0
    const double head = mat[j * k + j];
    const double sign = head >= 0.0 ? 1.0 : -1.0;
    const double v0 = head + sign * norm;
    // Householder vector (v0, mat[j+1..], ...) scaled so its head is v0
    std::vector<double> hv(rows - j);
    hv[0] = v0;
    for (std::size_t i = j + 1; i < rows; ++i) hv[i - j] = mat[i * k + j];
    const double hnorm2 = norm2 - head * head + v0 * v0;
    for (std::size_t c = j; c < k; ++c) {
      double proj = 0.0;
      for (std::size_t i = j; i < rows; ++i) proj += hv[i - j] * mat[i * k + c];
      const double coeff = 2.0 * proj / hnorm2;
      for (std::size_t i = j; i < rows; ++i) mat[i * k + c] -= coeff * hv[i - j];
    }
    double proj = 0.0;
    for (std::size_t i = j; i < rows; ++i) proj += hv[i - j] * rhs[i];
    const double coeff = 2.0 * proj / hnorm2;
    for (std::size_t i = j; i < rows; ++i) rhs[i] -= coeff * hv[i - j];
  }

  std::vector<double> y(k, 0.0);
  for (std::size_t jj = k; jj-- > 0;) {
    double sum = rhs[jj];
    for (std::size_t c = jj + 1; c < k; ++c) sum -= mat[jj * k + c] * y[c];
    const double diag = mat[jj * k + jj];
    y[jj] = std::abs(diag) <= rank_tol ? 0.0 : sum / diag;
  }
  return y;
}

std::vector<double> reconstruct_from_basis(const BidiagEntries& bd,
                                           std::span<const double> y) {
  if (bd.basis.empty()) throw std::invalid_argument("no basis vectors were stored");
  if (y.size() > bd.basis.size()) throw DimensionError("more coefficients than basis vectors");
  std::vector<double> f(bd.basis.front().size(), 0.0);
  for (std::size_t j = 0; j < y.size(); ++j) {
    axpy(y[j], bd.basis[j].data(), f.data(), f.size());
  }
  return f;
}

KrylovBasis krylov_basis(const LinearOperator& a, const SpdMap* msolver, const SparseSpd* m,
                         double tau, std::span<const double> g, int k) {
  if (msolver != nullptr && m != nullptr) {
    throw std::invalid_argument("pass the preconditioner solver or the regularizer matrix, "
                                "not both");
  }
  if (k < 1) throw std::invalid_argument("need at least one basis vector");
  if (g.size() != a.n_rows()) throw DimensionError("right-hand side length mismatch");
  const std::size_t n = a.n_cols();

  KrylovBasis out;
  std::vector<double> t = a.apply_adjoint(g);
  std::vector<double> tmp_rows(a.n_rows()), scratch(n);
  if (msolver != nullptr) {
    msolver->solve(t, scratch);
    t.swap(scratch);
  }

  const double seed_norm = nrm2(t.data(), n);
  if (seed_norm == 0.0) {
    out.rank_exhausted = true;
    return out;
  }

  for (int j = 0; j < k; ++j) {
    if (j > 0) {
      // next raw vector from the previous orthonormalized one
      const std::vector<double>& prev = out.vectors.back();
      a.apply(prev, tmp_rows);
      a.apply_adjoint(tmp_rows, t);
      if (m != nullptr && tau > 0.0) {
        m->multiply(prev, scratch);
        axpy(tau, scratch.data(), t.data(), n);
      }
      if (msolver != nullptr) {
        msolver->solve(t, scratch);
        t.swap(scratch);
      }
    }
    const double before = nrm2(t.data(), n);
    for (int pass = 0; pass < 2; ++pass) {  // Gram-Schmidt with reorthogonalization
      for (const auto& qvec : out.vectors) {
        axpy(-dot(qvec.data(), t.data(), n), qvec.data(), t.data(), n);
      }
    }
    const double after = nrm2(t.data(), n);
    if (after <= 1e-12 * std::max(before, seed_norm)) {
      out.rank_exhausted = true;
      break;
    }
    scal(1.0 / after, t.data(), n);
    out.vectors.push_back(t);
  }
  return out;
}

}  // namespace mlsqr
