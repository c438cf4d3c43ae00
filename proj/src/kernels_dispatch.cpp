#include <atomic>

#include "fgl/kernels.hpp"

namespace fgl::kernels {

namespace {

bool detect_avx2() {
#ifdef FGL_HAVE_AVX2_KERNELS
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> b{detect_avx2() ? Backend::Avx2 : Backend::Scalar};
  return b;
}

bool use_avx2() { return backend_slot().load(std::memory_order_relaxed) == Backend::Avx2; }

}  // namespace

bool avx2_available() {
  static const bool ok = detect_avx2();
  return ok;
}

Backend active_backend() { return backend_slot().load(); }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available()) b = Backend::Scalar;
  backend_slot().store(b);
}

#ifdef FGL_HAVE_AVX2_KERNELS
#define FGL_DISPATCH(fn, ...) return use_avx2() ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define FGL_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) { FGL_DISPATCH(dot, a, b, n); }

double dot3(const double* x, const double* a, const double* b, std::size_t n) {
  FGL_DISPATCH(dot3, x, a, b, n);
}

void axpy(double s, const double* x, double* y, std::size_t n) { FGL_DISPATCH(axpy, s, x, y, n); }

void three_term(const double* x, const double* v, const double* vprev, double alpha, double beta,
                double* out, std::size_t n) {
  FGL_DISPATCH(three_term, x, v, vprev, alpha, beta, out, n);
}

double cauchy_sum(const double* w, const double* f, const double* x, double z, std::size_t n) {
  FGL_DISPATCH(cauchy_sum, w, f, x, z, n);
}

}  // namespace fgl::kernels
