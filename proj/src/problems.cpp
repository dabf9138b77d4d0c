#include "mlsqr/problems.hpp"

#include <cmath>
#include <stdexcept>

#include "mlsqr/diffusion.hpp"
#include "mlsqr/kernels.hpp"
#include "mlsqr/rng.hpp"

namespace mlsqr {

double GaussianSampler::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1p-53;
  const double u2 = static_cast<double>((engine_() >> 11) + 1) * 0x1p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

void GaussianSampler::fill(std::span<double> out, double stddev) {
  for (double& v : out) v = stddev * next();
}

Phantom1D Phantom1D::default_phantom() {
  return {{{0.00, 0.0},
           {0.10, 1.0},
           {0.28, 0.0},
           {0.40, 1.5},
           {0.62, 0.2},
           {0.76, 2.0},
           {0.80, 0.2},
           {0.90, 0.0}}};
}

void Phantom1D::validate() const {
  if (jumps.empty()) throw std::invalid_argument("phantom needs at least one plateau");
  double last = -1.0;
  for (const auto& [pos, level] : jumps) {
    (void)level;
    if (!(pos >= 0.0 && pos <= 1.0)) {
      throw std::invalid_argument("phantom positions must lie in [0, 1]");
    }
    if (!(pos > last)) {
      throw std::invalid_argument("phantom positions must be strictly increasing");
    }
    last = pos;
  }
  if (jumps.front().first != 0.0) {
    throw std::invalid_argument("phantom must define the level at position 0");
  }
}

std::vector<double> Phantom1D::realize(std::size_t n) const {
  validate();
  std::vector<double> f(n);
  const double h = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * h;
    double level = jumps.front().second;
    for (const auto& [pos, lev] : jumps) {
      if (pos <= x) level = lev;
    }
    f[i] = level;
  }
  return f;
}

Phantom2D Phantom2D::default_phantom() {
  Phantom2D p;
  Shape2D d1;
  d1.kind = Shape2D::Kind::disk;
  d1.cx = 0.30;
  d1.cy = 0.35;
  d1.radius = 0.13;
  d1.value = 1.0;
  Shape2D d2;
  d2.kind = Shape2D::Kind::disk;
  d2.cx = 0.70;
  d2.cy = 0.65;
  d2.radius = 0.10;
  d2.value = 1.0;
  Shape2D r1;
  r1.kind = Shape2D::Kind::rectangle;
  r1.x0 = 0.55;
  r1.y0 = 0.15;
  r1.x1 = 0.85;
  r1.y1 = 0.35;
  r1.value = 0.6;
  p.shapes = {d1, d2, r1};
  return p;
}

void Phantom2D::validate() const {
  for (const Shape2D& s : shapes) {
    if (s.kind == Shape2D::Kind::rectangle) {
      if (!(s.x1 > s.x0 && s.y1 > s.y0)) {
        throw std::invalid_argument("degenerate rectangle in phantom");
      }
    } else if (!(s.radius > 0.0)) {
      throw std::invalid_argument("disk radius must be positive");
    }
  }
}

std::vector<double> Phantom2D::realize(std::size_t nx, std::size_t ny) const {
  validate();
  std::vector<double> f(nx * ny, 0.0);
  const double hx = 1.0 / static_cast<double>(nx);
  const double hy = 1.0 / static_cast<double>(ny);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const double y = (static_cast<double>(iy) + 0.5) * hy;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double x = (static_cast<double>(ix) + 0.5) * hx;
      for (const Shape2D& s : shapes) {
        const bool inside =
            s.kind == Shape2D::Kind::rectangle
                ? (x >= s.x0 && x <= s.x1 && y >= s.y0 && y <= s.y1)
                : ((x - s.cx) * (x - s.cx) + (y - s.cy) * (y - s.cy) <= s.radius * s.radius);
        if (inside) f[iy * nx + ix] = s.value;
      }
    }
  }
  return f;
}

ExperimentBundle make_deconv1d(std::size_t n, double sigma_f, double sigma_n,
                               const Phantom1D& phantom, std::uint64_t seed) {
  if (n < 2) throw DimensionError("deconvolution grid needs at least 2 samples");
  if (!(sigma_n >= 0.0)) throw std::invalid_argument("sigma_n must be nonnegative");
  ExperimentBundle bundle;
  auto op = std::make_shared<GaussianConvolution1D>(n, sigma_f, 1.0);
  bundle.grid = Grid::line(n, op->grid_spacing());
  bundle.data_cell_measure = op->grid_spacing();
  bundle.f_true = phantom.realize(n);
  bundle.g = op->apply(bundle.f_true);
  bundle.sigma_n = sigma_n;
  bundle.seed = seed;
  if (sigma_n > 0.0) {
    GaussianSampler noise(seed);
    std::vector<double> nvec(n);
    noise.fill(nvec, sigma_n);
    kernels::axpy(1.0, nvec.data(), bundle.g.data(), n);
  }
  bundle.op = std::move(op);
  return bundle;
}

ExperimentBundle make_deblur2d(std::size_t nx, std::size_t ny, double sigma_f, double sigma_n,
                               const Phantom2D& phantom, std::uint64_t seed) {
  if (nx < 2 || ny < 2) throw DimensionError("deblurring grid needs at least 2x2 samples");
  if (!(sigma_n >= 0.0)) throw std::invalid_argument("sigma_n must be nonnegative");
  ExperimentBundle bundle;
  auto op = std::make_shared<SeparableGaussianBlur2D>(nx, ny, sigma_f);
  const double hx = 1.0 / static_cast<double>(nx);
  bundle.grid = Grid::plane(nx, ny, hx);
  bundle.data_cell_measure = hx * (1.0 / static_cast<double>(ny));
  bundle.f_true = phantom.realize(nx, ny);
  bundle.g = op->apply(bundle.f_true);
  bundle.sigma_n = sigma_n;
  bundle.seed = seed;
  if (sigma_n > 0.0) {
    GaussianSampler noise(seed);
    std::vector<double> nvec(nx * ny);
    noise.fill(nvec, sigma_n);
    kernels::axpy(1.0, nvec.data(), bundle.g.data(), nvec.size());
  }
  bundle.op = std::move(op);
  return bundle;
}

std::pair<SparseSpd, SpdSolver> make_ideal_preconditioner(const ExperimentBundle& bundle,
                                                          const PenaltySpec& spec,
                                                          std::optional<double> epsilon,
                                                          SpdSolverMode mode, int k_inner) {
  SparseSpd m = assemble_m(bundle.grid, bundle.f_true, spec, 0.0);
  m = m.with_shift(epsilon ? *epsilon : auto_shift(m));
  if (mode == SpdSolverMode::direct_cholesky) {
    SpdSolver solver = SpdSolver::factorize(m);
    return {std::move(m), std::move(solver)};
  }
  SpdSolver solver = SpdSolver::inner_cg(m, k_inner);
  return {std::move(m), std::move(solver)};
}

double error_norm(std::span<const double> f, std::span<const double> f_true) {
  if (f.size() != f_true.size()) throw DimensionError("error norm length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - f_true[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double error_norm_weighted(std::span<const double> f, std::span<const double> f_true,
                           double cell_measure) {
  return std::sqrt(cell_measure) * error_norm(f, f_true);
}

}  // namespace mlsqr
