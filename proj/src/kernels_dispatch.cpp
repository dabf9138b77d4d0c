#include "mlsqr/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

#include "kernels_detail.hpp"

namespace mlsqr::kernels {

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);
using XpbyFn = void (*)(const double*, double, double*, std::size_t);
using ScalFn = void (*)(double, double*, std::size_t);

struct Table {
  DotFn dot;
  AxpyFn axpy;
  XpbyFn xpby;
  ScalFn scal;
  Backend backend;
  const char* name;
};

constexpr Table kScalar{detail::dot_scalar, detail::axpy_scalar,
                        detail::xpby_scalar, detail::scal_scalar,
                        Backend::scalar, "scalar"};

#if defined(MLSQR_HAVE_AVX2)
constexpr Table kAvx2{detail::dot_avx2, detail::axpy_avx2, detail::xpby_avx2,
                      detail::scal_avx2, Backend::avx2, "avx2"};
#endif

bool host_has_avx2() {
#if defined(MLSQR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* lookup(Backend which) {
  switch (which) {
    case Backend::scalar:
      return &kScalar;
    case Backend::avx2:
#if defined(MLSQR_HAVE_AVX2)
      if (host_has_avx2()) return &kAvx2;
#endif
      return nullptr;
  }
  return nullptr;
}

Table g_active = [] {
  if (const char* env = std::getenv("MLSQR_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return kScalar;
    if (std::strcmp(env, "avx2") == 0) {
      if (const Table* t = lookup(Backend::avx2)) return *t;
    }
  }
  if (const Table* t = lookup(Backend::avx2)) return *t;
  return kScalar;
}();

}  // namespace

double dot(const double* x, const double* y, std::size_t n) {
  return g_active.dot(x, y, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
  g_active.axpy(a, x, y, n);
}
void xpby(const double* x, double b, double* y, std::size_t n) {
  g_active.xpby(x, b, y, n);
}
void scal(double a, double* x, std::size_t n) { g_active.scal(a, x, n); }

double nrm2(const double* x, std::size_t n) {
  return std::sqrt(g_active.dot(x, x, n));
}

Backend active() { return g_active.backend; }
std::string_view backend_name() { return g_active.name; }
bool available(Backend which) { return lookup(which) != nullptr; }

bool select(Backend which) {
  if (const Table* t = lookup(which)) {
    g_active = *t;
    return true;
  }
  return false;
}

}  // namespace mlsqr::kernels
