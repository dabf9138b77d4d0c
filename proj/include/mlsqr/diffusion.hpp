#pragma once

#include <span>
#include <vector>

#include "mlsqr/grid.hpp"
#include "mlsqr/penalty.hpp"
#include "mlsqr/sparse.hpp"

namespace mlsqr {

/// Discrete inhomogeneous diffusion operator M_f, the priorconditioner: for
/// each grid edge e = (i, j) with gradient d_e = (f_j - f_i) / h and
/// diffusivity c_e = c(|d_e|),
///
///   M_ii += c_e w_e / h^2,  M_jj += c_e w_e / h^2,  M_ij = M_ji -= c_e w_e / h^2,
///
/// with edge weight w_e = h in 1D and h^2 in 2D, plus `epsilon` on the
/// diagonal. The unshifted matrix annihilates constants (Neumann boundary)
/// and is positive semidefinite; epsilon > 0 makes it definite.
SparseSpd assemble_m(const Grid& grid, std::span<const double> f, const PenaltySpec& spec,
                     double epsilon);

/// Default diagonal shift: 1e-8 times the largest unshifted diagonal entry.
double auto_shift(const SparseSpd& unshifted);

/// assemble_m with the default shift.
SparseSpd assemble_m_auto(const Grid& grid, std::span<const double> f,
                          const PenaltySpec& spec);

/// R(f) = sum_e w_e r(|d_e|), discretized so that its exact gradient is
/// M_{f, eps=0} f.
double penalty_functional(const Grid& grid, std::span<const double> f,
                          const PenaltySpec& spec);

/// Gradient of the penalty functional; computed as assemble_m(grid, f, spec, 0) * f.
std::vector<double> penalty_gradient(const Grid& grid, std::span<const double> f,
                                     const PenaltySpec& spec);

}  // namespace mlsqr
