#pragma once

#include <cstddef>

namespace mlsqr {

/// Uniform 1D or 2D grid with Neumann boundary. 2D nodes are ordered
/// row-major with x fastest: node(ix, iy) = iy * nx + ix.
struct Grid {
  int dims = 1;
  std::size_t nx = 2;
  std::size_t ny = 1;
  double spacing = 1.0;

  static Grid line(std::size_t n, double h);
  static Grid plane(std::size_t nx, std::size_t ny, double h);

  std::size_t num_nodes() const noexcept { return nx * ny; }
  std::size_t num_edges() const noexcept {
    return dims == 1 ? nx - 1 : (nx - 1) * ny + nx * (ny - 1);
  }
  /// Quadrature weight of one edge in the penalty sum: h in 1D, h^2 in 2D.
  double edge_weight() const noexcept {
    return dims == 1 ? spacing : spacing * spacing;
  }
  std::size_t node(std::size_t ix, std::size_t iy) const noexcept { return iy * nx + ix; }
};

}  // namespace mlsqr
