#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace mlsqr::kernels {

/// Vector arithmetic primitives behind every solver inner loop. A backend is
/// selected once at startup (best instruction set the CPU supports, or the
/// one named in the MLSQR_KERNELS environment variable) and stays fixed for
/// the lifetime of the process, so repeated runs are reproducible.
enum class Backend { scalar, avx2 };

/// dot <- sum_i x[i] * y[i]
double dot(const double* x, const double* y, std::size_t n);
/// y <- y + a * x
void axpy(double a, const double* x, double* y, std::size_t n);
/// y <- x + b * y
void xpby(const double* x, double b, double* y, std::size_t n);
/// x <- a * x
void scal(double a, double* x, std::size_t n);
/// Euclidean norm.
double nrm2(const double* x, std::size_t n);

Backend active();
std::string_view backend_name();
bool available(Backend which);
/// Switch backends explicitly (equivalence tests). Returns false and leaves
/// the current backend in place if `which` is unavailable on this host.
bool select(Backend which);

// span convenience wrappers
inline double dot(std::span<const double> x, std::span<const double> y) {
  return dot(x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  axpy(a, x.data(), y.data(), y.size());
}
inline void xpby(std::span<const double> x, double b, std::span<double> y) {
  xpby(x.data(), b, y.data(), y.size());
}
inline void scal(double a, std::span<double> x) { scal(a, x.data(), x.size()); }
inline double nrm2(std::span<const double> x) { return nrm2(x.data(), x.size()); }

}  // namespace mlsqr::kernels
