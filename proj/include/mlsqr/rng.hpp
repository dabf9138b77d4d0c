#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mlsqr {

/// Seed-stable standard normal sampler: an std::mt19937_64 stream mapped to
/// uniforms on (0, 1] by u = (x >> 11 + 1) * 2^-53 and transformed in
/// Box-Muller pairs
///
///   z0 = sqrt(-2 ln u1) cos(2 pi u2),  z1 = sqrt(-2 ln u1) sin(2 pi u2).
///
/// The mt19937_64 sequence is fixed by the standard, so a given seed yields
/// the same draws everywhere up to libm rounding in log/sin/cos.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double next();
  void fill(std::span<double> out, double stddev);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mlsqr
