#include "mlsqr/diffusion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mlsqr {

namespace {

void check_grid(const Grid& grid) {
  if (grid.dims != 1 && grid.dims != 2) throw std::invalid_argument("grid must be 1D or 2D");
  if (grid.nx < 2 || (grid.dims == 2 && grid.ny < 2)) {
    throw DimensionError("grid extents must be at least 2");
  }
  if (!(grid.spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
}

void check_field(const Grid& grid, std::span<const double> f) {
  if (f.size() != grid.num_nodes()) {
    throw DimensionError("field length " + std::to_string(f.size()) +
                         " does not match grid with " + std::to_string(grid.num_nodes()) +
                         " nodes");
  }
}

template <typename EdgeFn>
void for_each_edge(const Grid& grid, EdgeFn&& fn) {
  if (grid.dims == 1) {
    for (std::size_t i = 0; i + 1 < grid.nx; ++i) fn(i, i + 1);
    return;
  }
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix + 1 < grid.nx; ++ix) {
      fn(grid.node(ix, iy), grid.node(ix + 1, iy));
    }
  }
  for (std::size_t iy = 0; iy + 1 < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      fn(grid.node(ix, iy), grid.node(ix, iy + 1));
    }
  }
}

}  // namespace

Grid Grid::line(std::size_t n, double h) {
  Grid g{1, n, 1, h};
  check_grid(g);
  return g;
}

Grid Grid::plane(std::size_t nx, std::size_t ny, double h) {
  Grid g{2, nx, ny, h};
  check_grid(g);
  return g;
}

SparseSpd assemble_m(const Grid& grid, std::span<const double> f, const PenaltySpec& spec,
                     double epsilon) {
  check_grid(grid);
  check_field(grid, f);
  spec.validate();
  if (!(epsilon >= 0.0)) throw std::invalid_argument("diagonal shift must be nonnegative");

  const double h = grid.spacing;
  const double scale = grid.edge_weight() / (h * h);
  std::vector<Triplet> trips;
  trips.reserve(4 * grid.num_edges());
  for_each_edge(grid, [&](std::size_t i, std::size_t j) {
    const double d = (f[j] - f[i]) / h;
    const double c = diffusivity(spec, std::abs(d)) * scale;
    trips.push_back({i, i, c});
    trips.push_back({j, j, c});
    trips.push_back({i, j, -c});
    trips.push_back({j, i, -c});
  });
  return SparseSpd::from_triplets(grid.num_nodes(), trips, epsilon);
}

double auto_shift(const SparseSpd& unshifted) { return 1e-8 * unshifted.max_diagonal(); }

SparseSpd assemble_m_auto(const Grid& grid, std::span<const double> f,
                          const PenaltySpec& spec) {
  SparseSpd m = assemble_m(grid, f, spec, 0.0);
  return m.with_shift(auto_shift(m));
}

double penalty_functional(const Grid& grid, std::span<const double> f,
                          const PenaltySpec& spec) {
  check_grid(grid);
  check_field(grid, f);
  spec.validate();
  const double h = grid.spacing;
  const double w = grid.edge_weight();
  double acc = 0.0;
  for_each_edge(grid, [&](std::size_t i, std::size_t j) {
    acc += w * r_value(spec, std::abs((f[j] - f[i]) / h));
  });
  return acc;
}

std::vector<double> penalty_gradient(const Grid& grid, std::span<const double> f,
                                     const PenaltySpec& spec) {
  return assemble_m(grid, f, spec, 0.0).multiply(f);
}

}  // namespace mlsqr
