#include "mlsqr/outer.hpp"

#include <cmath>
#include <stdexcept>

#include "mlsqr/kernels.hpp"

namespace mlsqr {

void OuterConfig::validate() const {
  penalty.validate();
  inner_stop.validate();
  if (inner_cap < 1) throw std::invalid_argument("inner_cap must be at least 1");
  if (!(rel_decrease_threshold > 0.0 && rel_decrease_threshold < 1.0)) {
    throw std::invalid_argument("rel_decrease_threshold must lie in (0, 1)");
  }
  if (max_outer < 1) throw std::invalid_argument("max_outer must be at least 1");
  if (spd_mode == SpdSolverMode::inner_cg && k_inner < 1) {
    throw std::invalid_argument("inner-CG mode needs k_inner >= 1");
  }
  if (epsilon && !(*epsilon >= 0.0)) {
    throw std::invalid_argument("diagonal shift must be nonnegative");
  }
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be nonnegative");
}

std::string_view to_string(OuterStopReason reason) {
  return reason == OuterStopReason::stagnation ? "stagnation" : "max_outer";
}

bool outer_stop_check(std::span<const double> history, double threshold) {
  if (history.empty()) throw std::invalid_argument("empty penalty history");
  const std::size_t k = history.size();
  if (k < 2) return false;
  const double prev = history[k - 2];
  if (prev == 0.0) return true;
  return (history[k - 1] - prev) / prev > -threshold;
}

OuterReport solve_nonlinear(const LinearOperator& a, std::span<const double> g,
                            const Grid& grid, const OuterConfig& cfg) {
  cfg.validate();
  if (grid.num_nodes() != a.n_cols()) {
    throw DimensionError("grid does not match operator columns");
  }
  if (g.size() != a.n_rows()) throw DimensionError("data length mismatch");

  StoppingConfig inner = cfg.inner_stop;
  inner.max_iters = std::min(inner.max_iters, cfg.inner_cap);

  SolveOptions inner_opts;
  inner_opts.record_snapshots = cfg.record_inner_snapshots;

  OuterReport report;
  std::vector<double> prev(a.n_cols(), 0.0);  // f^0 = 0
  std::vector<double> history;

  for (int k = 1; k <= cfg.max_outer; ++k) {
    SparseSpd m = assemble_m(grid, prev, cfg.penalty, 0.0);
    const double eps = cfg.epsilon ? *cfg.epsilon : auto_shift(m);
    m = m.with_shift(eps);

    SolveResult inner_result;
    if (cfg.spd_mode == SpdSolverMode::direct_cholesky) {
      const SpdSolver solver = SpdSolver::factorize(m);
      inner_result = mlsqr(a, solver, g, cfg.tau, inner, inner_opts);
    } else {
      const SpdSolver solver = SpdSolver::inner_cg(std::move(m), cfg.k_inner);
      inner_result = mlsqr(a, solver, g, cfg.tau, inner, inner_opts);
    }

    std::vector<double> cur = std::move(inner_result.solution);
    const double penalty_value = penalty_functional(grid, cur, cfg.penalty);
    history.push_back(penalty_value);

    OuterStep step;
    step.k = k;
    step.penalty_value = penalty_value;
    step.inner_iterations = inner_result.iterations;
    step.inner_stop = inner_result.stop_reason;
    step.final_residual = inner_result.trace.iterations.empty()
                              ? kernels::nrm2(g.data(), g.size())
                              : inner_result.trace.iterations.back().res_data;
    step.inner_trace = std::move(inner_result.trace);
    if (cfg.keep_iterates) step.solution = cur;
    report.steps.push_back(std::move(step));

    if (outer_stop_check(history, cfg.rel_decrease_threshold)) {
      // keep the last iterate before the trigger; f^k stays in the report
      report.stop_reason = OuterStopReason::stagnation;
      report.triggered_at = k;
      report.solution = std::move(prev);
      return report;
    }
    prev = std::move(cur);
  }
  report.stop_reason = OuterStopReason::max_outer;
  report.solution = std::move(prev);
  return report;
}

}  // namespace mlsqr
