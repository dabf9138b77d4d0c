#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mlsqr/diffusion.hpp"
#include "mlsqr/krylov.hpp"

namespace mlsqr {

struct OuterConfig {
  double tau = 0.0;
  PenaltySpec penalty;
  StoppingConfig inner_stop;  // the discrepancy test for the inner solves
  int inner_cap = 20;         // hard cap on Krylov iterations per outer step
  double rel_decrease_threshold = 0.15;
  int max_outer = 25;
  SpdSolverMode spd_mode = SpdSolverMode::direct_cholesky;
  int k_inner = 30;                  // inner-CG iteration count
  std::optional<double> epsilon;     // diagonal shift; nullopt = 1e-8 * max diagonal
  bool keep_iterates = false;        // retain f^k per outer step
  bool record_inner_snapshots = false;

  void validate() const;
};

enum class OuterStopReason { stagnation, max_outer };
std::string_view to_string(OuterStopReason reason);

struct OuterStep {
  int k = 0;
  double penalty_value = 0.0;   // R(f^k)
  int inner_iterations = 0;
  double final_residual = 0.0;  // |g - A f^k|
  StopReason inner_stop = StopReason::max_iters;
  SolveTrace inner_trace;
  std::vector<double> solution;  // empty unless keep_iterates
};

struct OuterReport {
  std::vector<double> solution;  // the returned iterate (see solve_nonlinear)
  std::vector<OuterStep> steps;
  OuterStopReason stop_reason = OuterStopReason::max_outer;
  int triggered_at = 0;  // outer index k at which stagnation fired, 0 if none
};

/// True iff the penalty history has stagnated: k >= 2 and
/// (R_k - R_{k-1}) / R_{k-1} > -threshold. A vanishing R_{k-1} counts as
/// stagnation.
bool outer_stop_check(std::span<const double> history, double threshold);

/// Lagged diffusivity fixed point iteration, priorconditioned: starting from
/// f^0 = 0, each outer step assembles M at the previous iterate, builds the
/// configured solver for it and runs mlsqr from a zero initial iterate under
/// the same discrepancy test and iteration cap every step. The loop breaks
/// when R(f^k) stops decreasing fast enough; the returned solution is then
/// f^{k-1}, the last iterate before the trigger (f^k stays inspectable in
/// the report).
OuterReport solve_nonlinear(const LinearOperator& a, std::span<const double> g,
                            const Grid& grid, const OuterConfig& cfg);

}  // namespace mlsqr
