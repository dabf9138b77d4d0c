#include "mlsqr/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <vector>

#include "mlsqr/diffusion.hpp"
#include "mlsqr/kernels.hpp"
#include "mlsqr/outer.hpp"

namespace mlsqr {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExperimentBundle build_bundle(const ProblemConfig& p, std::optional<std::uint64_t> seed) {
  const std::uint64_t use_seed = seed.value_or(p.seed);
  if (p.type == ProblemConfig::Type::deconv1d) {
    const Phantom1D phantom = p.phantom1d.value_or(Phantom1D::default_phantom());
    return make_deconv1d(p.n, p.sigma_f, p.sigma_n, phantom, use_seed);
  }
  const Phantom2D phantom = p.phantom2d.value_or(Phantom2D::default_phantom());
  return make_deblur2d(p.nx, p.ny, p.sigma_f, p.sigma_n, phantom, use_seed);
}

SparseSpd build_regularizer(const ExperimentBundle& bundle, const SolverConfig& s,
                            double& epsilon_used) {
  SparseSpd m = s.regularizer == "ideal"
                    ? assemble_m(bundle.grid, bundle.f_true, s.penalty, 0.0)
                    : assemble_m(bundle.grid, std::vector<double>(bundle.grid.num_nodes(), 0.0),
                                 s.penalty, 0.0);
  epsilon_used = s.epsilon ? *s.epsilon : auto_shift(m);
  return m.with_shift(epsilon_used);
}

struct TraceRow {
  int outer_k;
  int inner_i;
  const IterationRecord* rec;
  const std::vector<double>* snapshot;  // may be null
};

void write_trace(const fs::path& path, const std::vector<TraceRow>& rows,
                 const ExperimentBundle& bundle, const PenaltySpec& penalty) {
  std::ofstream out(path);
  out << "outer_k,inner_i,res_data,res_damped,s2_estimate,anorm_est,cond_est,penalty_R,"
         "error_norm_if_truth_known\n";
  for (const TraceRow& row : rows) {
    double penalty_value = std::numeric_limits<double>::quiet_NaN();
    double error = std::numeric_limits<double>::quiet_NaN();
    if (row.snapshot != nullptr) {
      penalty_value = penalty_functional(bundle.grid, *row.snapshot, penalty);
      error = error_norm(*row.snapshot, bundle.f_true);
    }
    out << row.outer_k << ',' << row.inner_i << ',' << fmt(row.rec->res_data) << ','
        << fmt(row.rec->res_damped) << ',' << fmt(row.rec->s2_value) << ','
        << fmt(row.rec->anorm_est) << ',' << fmt(row.rec->cond_est) << ','
        << fmt(penalty_value) << ',' << fmt(error) << '\n';
  }
}

void write_solution(const fs::path& path, const ExperimentBundle& bundle,
                    std::span<const double> f) {
  std::ofstream out(path);
  const Grid& grid = bundle.grid;
  if (grid.dims == 1) {
    out << "x,f,f_true\n";
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const double x = (static_cast<double>(i) + 0.5) * grid.spacing;
      out << fmt(x) << ',' << fmt(f[i]) << ',' << fmt(bundle.f_true[i]) << '\n';
    }
  } else {
    out << "x,y,f,f_true\n";
    for (std::size_t iy = 0; iy < grid.ny; ++iy) {
      for (std::size_t ix = 0; ix < grid.nx; ++ix) {
        const std::size_t idx = grid.node(ix, iy);
        out << fmt((static_cast<double>(ix) + 0.5) * grid.spacing) << ','
            << fmt((static_cast<double>(iy) + 0.5) / static_cast<double>(grid.ny)) << ','
            << fmt(f[idx]) << ',' << fmt(bundle.f_true[idx]) << '\n';
      }
    }
  }
}

void write_basis(const fs::path& dir, const ExperimentBundle& bundle,
                 const KrylovBasis& basis) {
  const Grid& grid = bundle.grid;
  for (std::size_t j = 0; j < basis.vectors.size(); ++j) {
    char name[32];
    std::snprintf(name, sizeof name, "basis_%03zu.csv", j);
    std::ofstream out(dir / name);
    if (grid.dims == 1) {
      out << "x,v\n";
      for (std::size_t i = 0; i < grid.nx; ++i) {
        out << fmt((static_cast<double>(i) + 0.5) * grid.spacing) << ','
            << fmt(basis.vectors[j][i]) << '\n';
      }
    } else {
      out << "x,y,v\n";
      for (std::size_t iy = 0; iy < grid.ny; ++iy) {
        for (std::size_t ix = 0; ix < grid.nx; ++ix) {
          out << fmt((static_cast<double>(ix) + 0.5) * grid.spacing) << ','
              << fmt((static_cast<double>(iy) + 0.5) / static_cast<double>(grid.ny)) << ','
              << fmt(basis.vectors[j][grid.node(ix, iy)]) << '\n';
        }
      }
    }
  }
}

int first_discrepancy_row(const std::vector<TraceRow>& rows, const StoppingConfig& stop,
                          double delta_euclid) {
  if (!stop.use_s4) return -1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].rec->res_data <= stop.eta * delta_euclid) return static_cast<int>(i) + 1;
  }
  return -1;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir_override,
                          std::optional<std::uint64_t> seed_override, bool quiet) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path out_dir =
      out_dir_override.empty() ? fs::path(cfg.output.directory) : out_dir_override;
  fs::create_directories(out_dir);

  ExperimentBundle bundle = build_bundle(cfg.problem, seed_override);
  const LinearOperator& a = *bundle.op;

  // Noise levels in configs are quoted in the function-space (grid-weighted)
  // norm; the solvers compare Euclidean norms, so rescale delta.
  const double sqrt_measure = std::sqrt(bundle.data_cell_measure);
  StoppingConfig stop = cfg.solver.stopping;
  const double delta_euclid = stop.use_s4 ? stop.delta / sqrt_measure : 0.0;
  stop.delta = delta_euclid;

  SolveOptions opts;
  opts.record_snapshots = cfg.output.traces;
  opts.store_basis = cfg.solver.store_basis;

  std::vector<double> solution;
  std::vector<TraceRow> rows;
  std::string stop_reason;
  std::vector<std::string> inner_stop_reasons;
  std::vector<double> epsilons_used;
  int inner_total = 0;
  int outer_count = 0;

  // keep results alive for the trace rows
  SolveResult single;
  OuterReport outer_report;

  const SolverConfig& s = cfg.solver;
  switch (s.method) {
    case SolverConfig::Method::lsqr: {
      single = lsqr(a, bundle.g, s.tau, stop, opts);
      break;
    }
    case SolverConfig::Method::mlsqr: {
      double eps = 0.0;
      SparseSpd m = build_regularizer(bundle, s, eps);
      epsilons_used.push_back(eps);
      if (s.spd_mode == SpdSolverMode::direct_cholesky) {
        const SpdSolver solver = SpdSolver::factorize(m);
        single = mlsqr(a, solver, bundle.g, s.tau, stop, opts);
      } else {
        const SpdSolver solver = SpdSolver::inner_cg(std::move(m), s.k_inner);
        single = mlsqr(a, solver, bundle.g, s.tau, stop, opts);
      }
      break;
    }
    case SolverConfig::Method::cg_normal: {
      double eps = 0.0;
      const SparseSpd m = build_regularizer(bundle, s, eps);
      epsilons_used.push_back(eps);
      single = cg_normal(a, m, s.tau, bundle.g, stop, opts);
      break;
    }
    case SolverConfig::Method::lagged_diffusivity: {
      OuterConfig ocfg;
      ocfg.tau = s.tau;
      ocfg.penalty = s.penalty;
      ocfg.inner_stop = stop;
      ocfg.inner_cap = s.inner_cap;
      ocfg.rel_decrease_threshold = s.rel_decrease_threshold;
      ocfg.max_outer = s.max_outer;
      ocfg.spd_mode = s.spd_mode;
      ocfg.k_inner = s.k_inner;
      ocfg.epsilon = s.epsilon;
      ocfg.keep_iterates = cfg.output.outer_snapshots;
      ocfg.record_inner_snapshots = cfg.output.traces;
      outer_report = solve_nonlinear(a, bundle.g, bundle.grid, ocfg);
      break;
    }
  }

  const PenaltySpec trace_penalty = s.penalty;  // tikhonov unless configured
  if (s.method == SolverConfig::Method::lagged_diffusivity) {
    solution = outer_report.solution;
    stop_reason = std::string(to_string(outer_report.stop_reason));
    outer_count = static_cast<int>(outer_report.steps.size());
    for (const OuterStep& step : outer_report.steps) {
      inner_total += step.inner_iterations;
      inner_stop_reasons.emplace_back(to_string(step.inner_stop));
      for (std::size_t i = 0; i < step.inner_trace.iterations.size(); ++i) {
        const auto* snap =
            i < step.inner_trace.snapshots.size() ? &step.inner_trace.snapshots[i] : nullptr;
        rows.push_back({step.k, static_cast<int>(i) + 1, &step.inner_trace.iterations[i], snap});
      }
    }
  } else {
    solution = single.solution;
    stop_reason = std::string(to_string(single.stop_reason));
    inner_total = single.iterations;
    for (std::size_t i = 0; i < single.trace.iterations.size(); ++i) {
      const auto* snap = i < single.trace.snapshots.size() ? &single.trace.snapshots[i] : nullptr;
      rows.push_back({0, static_cast<int>(i) + 1, &single.trace.iterations[i], snap});
    }
  }

  if (cfg.output.traces) write_trace(out_dir / "trace.csv", rows, bundle, trace_penalty);
  if (cfg.output.solutions) write_solution(out_dir / "solution.csv", bundle, solution);

  if (cfg.output.basis_vectors > 0) {
    KrylovBasis basis;
    const int k = cfg.output.basis_vectors;
    if (s.method == SolverConfig::Method::mlsqr ||
        s.method == SolverConfig::Method::lagged_diffusivity) {
      // priorconditioned space; for the nonlinear run, at the final iterate
      SparseSpd m = s.method == SolverConfig::Method::mlsqr
                        ? [&] {
                            double eps = 0.0;
                            return build_regularizer(bundle, s, eps);
                          }()
                        : [&] {
                            SparseSpd raw = assemble_m(bundle.grid, solution, s.penalty, 0.0);
                            return raw.with_shift(s.epsilon ? *s.epsilon : auto_shift(raw));
                          }();
      const SpdSolver solver = SpdSolver::factorize(m);
      basis = krylov_basis(a, &solver, nullptr, s.tau, bundle.g, k);
    } else if (s.method == SolverConfig::Method::cg_normal) {
      double eps = 0.0;
      const SparseSpd m = build_regularizer(bundle, s, eps);
      basis = krylov_basis(a, nullptr, &m, s.tau, bundle.g, k);
    } else if (s.tau > 0.0) {
      const SparseSpd ident = SparseSpd::identity(a.n_cols());
      basis = krylov_basis(a, nullptr, &ident, s.tau, bundle.g, k);
    } else {
      basis = krylov_basis(a, nullptr, nullptr, 0.0, bundle.g, k);
    }
    write_basis(out_dir, bundle, basis);
  }

  if (cfg.output.outer_snapshots &&
      s.method == SolverConfig::Method::lagged_diffusivity) {
    for (const OuterStep& step : outer_report.steps) {
      if (step.solution.empty()) continue;
      char name[40];
      std::snprintf(name, sizeof name, "solution_outer_%03d.csv", step.k);
      write_solution(out_dir / name, bundle, step.solution);
    }
  }

  RunSummary summary;
  summary.method = std::string(to_string(s.method));
  summary.inner_iterations = inner_total;
  summary.outer_iterations = outer_count;
  summary.iterations_to_discrepancy = first_discrepancy_row(rows, stop, delta_euclid);
  {
    std::vector<double> af = a.apply(solution);
    double acc = 0.0;
    for (std::size_t i = 0; i < af.size(); ++i) {
      const double d = bundle.g[i] - af[i];
      acc += d * d;
    }
    summary.final_residual = std::sqrt(acc);
  }
  summary.final_residual_weighted = sqrt_measure * summary.final_residual;
  summary.final_error = error_norm(solution, bundle.f_true);
  summary.final_error_weighted =
      error_norm_weighted(solution, bundle.f_true, bundle.data_cell_measure);
  summary.final_penalty = penalty_functional(bundle.grid, solution, trace_penalty);
  summary.stop_reason = stop_reason;
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json meta;
  meta["config"] = {{"problem", cfg.problem.raw},
                    {"method", summary.method},
                    {"tau", s.tau},
                    {"seed_used", seed_override.value_or(cfg.problem.seed)}};
  meta["derived"] = {{"data_cell_measure", bundle.data_cell_measure},
                     {"delta_euclid", delta_euclid},
                     {"epsilon_used", epsilons_used},
                     {"kernels_backend", std::string(kernels::backend_name())}};
  meta["result"] = {{"stop_reason", summary.stop_reason},
                    {"inner_stop_reasons", inner_stop_reasons},
                    {"inner_iterations", summary.inner_iterations},
                    {"outer_iterations", summary.outer_iterations},
                    {"iterations_to_discrepancy", summary.iterations_to_discrepancy},
                    {"final_residual", summary.final_residual},
                    {"final_residual_weighted", summary.final_residual_weighted},
                    {"final_error", summary.final_error},
                    {"final_error_weighted", summary.final_error_weighted},
                    {"final_penalty", summary.final_penalty}};
  meta["wall_seconds"] = summary.wall_seconds;
  meta["timestamp"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
  std::ofstream meta_out(out_dir / "meta.json");
  meta_out << meta.dump(2) << '\n';

  if (!quiet) {
    std::cout << summary.method << ": " << summary.inner_iterations << " iterations";
    if (outer_count > 0) std::cout << " over " << outer_count << " outer steps";
    std::cout << ", stop=" << summary.stop_reason
              << ", residual=" << summary.final_residual_weighted
              << " (weighted), error=" << summary.final_error << '\n'
              << "artifacts in " << out_dir.string() << '\n';
  }
  return summary;
}

std::pair<RunSummary, RunSummary> compare_experiments(const ExperimentConfig& a,
                                                      const ExperimentConfig& b,
                                                      const fs::path& out_root,
                                                      std::optional<std::uint64_t> seed_override,
                                                      bool quiet) {
  if (a.problem.raw != b.problem.raw) {
    throw ConfigError("compare requires identical problem sections");
  }
  const fs::path root = out_root.empty() ? fs::path("compare_out") : out_root;
  RunSummary sa = run_experiment(a, root / "a", seed_override, true);
  RunSummary sb = run_experiment(b, root / "b", seed_override, true);

  if (!quiet) {
    auto line = [](const std::string& name, const std::string& va, const std::string& vb) {
      std::printf("%-28s %20s %20s\n", name.c_str(), va.c_str(), vb.c_str());
    };
    line("metric", sa.method, sb.method);
    line("iterations_to_discrepancy", std::to_string(sa.iterations_to_discrepancy),
         std::to_string(sb.iterations_to_discrepancy));
    line("inner_iterations", std::to_string(sa.inner_iterations),
         std::to_string(sb.inner_iterations));
    line("final_error", fmt(sa.final_error), fmt(sb.final_error));
    line("final_penalty", fmt(sa.final_penalty), fmt(sb.final_penalty));
    line("final_residual_weighted", fmt(sa.final_residual_weighted),
         fmt(sb.final_residual_weighted));
    line("stop_reason", sa.stop_reason, sb.stop_reason);
  }
  return {sa, sb};
}

}  // namespace mlsqr
