#pragma once

#include <cstddef>

// Per-backend kernel entry points. Only the dispatcher includes this.
namespace mlsqr::kernels::detail {

double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void xpby_scalar(const double* x, double b, double* y, std::size_t n);
void scal_scalar(double a, double* x, std::size_t n);

#if defined(MLSQR_HAVE_AVX2)
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void xpby_avx2(const double* x, double b, double* y, std::size_t n);
void scal_avx2(double a, double* x, std::size_t n);
#endif

}  // namespace mlsqr::kernels::detail
