#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mlsqr/linop.hpp"
#include "mlsqr/sparse.hpp"
#include "mlsqr/spdsolve.hpp"

namespace mlsqr {

/// Stopping rules, evaluated once per iteration in the fixed priority order
/// S4, S1, S2, S3, iteration cap. S1-S3 are the classic LSQR tests on the
/// running recurrence estimates; S4 is the Morozov discrepancy principle on
/// the data residual |g - A f_i| (a Euclidean norm here; callers working in
/// a function-space norm scale delta accordingly).
struct StoppingConfig {
  double atol = 1e-8;
  double btol = 1e-8;
  double conlim = 1e8;
  double delta = 0.0;  // noise level estimate for S4
  double eta = 1.1;    // safety factor > 1
  int max_iters = 100;
  bool use_s1 = false;
  bool use_s2 = false;
  bool use_s3 = false;
  bool use_s4 = false;

  static StoppingConfig max_iterations(int n);
  static StoppingConfig discrepancy(double delta, double eta, int max_iters);
  static StoppingConfig lsqr_classic(double atol, double btol, double conlim, int max_iters);

  void validate() const;
};

enum class StopReason { s1, s2, s3, s4, max_iters, breakdown };
std::string_view to_string(StopReason reason);

struct IterationRecord {
  int iteration = 0;
  double res_damped = 0.0;  // |rbar_i| of the damped system, from the recurrence
  double res_data = 0.0;    // |g - A f_i|
  bool res_data_exact = false;
  double s2_value = 0.0;  // |Abar^T rbar| / (|Abar| |rbar|)
  double anorm_est = 0.0;  // running Frobenius estimate of the damped operator
  double cond_est = 0.0;
  double xnorm_est = 0.0;  // solution norm estimate (transformed variable for mlsqr)
  double alpha = 0.0;      // alpha_{i+1}
  double beta = 0.0;       // beta_{i+1}
};

struct SolveTrace {
  std::vector<IterationRecord> iterations;
  std::vector<std::vector<double>> snapshots;  // f_i per iteration when requested
};

/// Entries of the lower bidiagonal matrix B_i (alphas on the diagonal,
/// betas[1..] on the subdiagonal, betas[0] = |g|) plus, when requested, the
/// right basis vectors (M-orthonormal for mlsqr) and the left ones.
struct BidiagEntries {
  std::vector<double> alphas;                       // alpha_1 .. alpha_i
  std::vector<double> betas;                        // beta_1 .. beta_{i+1}
  std::vector<std::vector<double>> basis;           // v_1 .. v_i
  std::vector<std::vector<double>> left_basis;      // u_1 .. u_{i+1}
};

struct SolveResult {
  std::vector<double> solution;
  int iterations = 0;
  StopReason stop_reason = StopReason::max_iters;
  SolveTrace trace;
  BidiagEntries bidiag;  // populated when store_basis was requested
};

struct SolveOptions {
  bool record_snapshots = false;
  bool store_basis = false;
};

/// LSQR with damping: minimizes |g - A f|^2 + tau |f|^2 over the growing
/// Krylov space; tau = 0 is plain LSQR with early stopping as the sole
/// regularization. Exact bidiagonalization breakdown terminates cleanly with
/// StopReason::breakdown (the iterate is then exact).
SolveResult lsqr(const LinearOperator& a, std::span<const double> g, double tau,
                 const StoppingConfig& stop, const SolveOptions& opts = {});

/// Factorization-free priorconditioned LSQR: bidiagonalization in the
/// M-weighted inner product with exactly one msolver.solve per iteration
/// (plus one at initialization). Iterates stay in the original variables.
/// A nonpositive M-weighted square norm raises BreakdownError (the msolver
/// is not SPD).
SolveResult mlsqr(const LinearOperator& a, const SpdMap& msolver, std::span<const double> g,
                  double tau, const StoppingConfig& stop, const SolveOptions& opts = {});

/// Dense upper-triangular factor R with M = R^T R.
struct DenseTriangularFactor {
  std::size_t n = 0;
  std::vector<double> upper_row_major;

  /// solve R x = b
  std::vector<double> solve_upper(std::span<const double> b) const;
  /// solve R^T x = b
  std::vector<double> solve_upper_transposed(std::span<const double> b) const;
};

/// Explicit-factor preconditioned LSQR, run literally with triangular solves
/// for R^{-1} and R^{-T}. Oracle for the factorization-free variant; dense,
/// small instances.
SolveResult lsqr_explicit(const LinearOperator& a, const DenseTriangularFactor& factor,
                          std::span<const double> g, double tau, const StoppingConfig& stop,
                          const SolveOptions& opts = {});

/// Conjugate gradients on the normal equation (A^T A + tau M) f = A^T g, the
/// unpriorconditioned reference. S2 is mirrored as the relative
/// normal-equation residual |A^T g - (A^T A + tau M) f_k| / |A^T g| <= atol
/// (this solver has no running |Abar| estimate); S4 uses the exact data
/// residual. Detected negative curvature raises BreakdownError.
SolveResult cg_normal(const LinearOperator& a, const SparseSpd& m, double tau,
                      std::span<const double> g, const StoppingConfig& stop,
                      const SolveOptions& opts = {});

/// Solves the projected damped least squares problem
/// min | [B_i; sqrt(tau) I] y - beta1 e1 | by dense QR of the stacked
/// (2i+1) x i system. One bidiagonalization serves every tau.
std::vector<double> solve_projected(const BidiagEntries& bd, double beta1, double tau);

/// f = V y for a stored basis.
std::vector<double> reconstruct_from_basis(const BidiagEntries& bd,
                                           std::span<const double> y);

struct KrylovBasis {
  std::vector<std::vector<double>> vectors;
  bool rank_exhausted = false;  // requested k exceeded the achievable rank
};

/// First k orthonormalized basis vectors of one of the three spaces:
///   msolver == nullptr, m == nullptr : K^{A^T A}          seeded by A^T g
///   m != nullptr                     : K^{A^T A + tau M}  seeded by A^T g
///   msolver != nullptr               : K^{M^-1 A^T A}     seeded by M^-1 A^T g
/// Gram-Schmidt with one reorthogonalization pass.
KrylovBasis krylov_basis(const LinearOperator& a, const SpdMap* msolver, const SparseSpd* m,
                         double tau, std::span<const double> g, int k);

/// Running quantities a solver hands to the stopping tests.
struct StoppingState {
  double rbar_norm = 0.0;
  double atrbar_norm = 0.0;
  double anorm = 0.0;
  double acond = 0.0;
  double xnorm = 0.0;
  double bnorm = 0.0;
  double data_res = 0.0;
  int iteration = 0;
};

std::optional<StopReason> evaluate_stopping(const StoppingState& state,
                                            const StoppingConfig& stop);

}  // namespace mlsqr
