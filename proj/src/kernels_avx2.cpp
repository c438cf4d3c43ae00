#include "fgl/kernels.hpp"

#ifdef FGL_HAVE_AVX2_KERNELS

#include <immintrin.h>

#define FGL_AVX2 __attribute__((target("avx2,fma")))

namespace fgl::kernels::avx2 {

namespace {

FGL_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

FGL_AVX2 double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

FGL_AVX2 double dot3(const double* x, const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(a + i));
    __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(a + i + 4));
    acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(b + i + 4), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * a[i] * b[i];
  return s;
}

FGL_AVX2 void axpy(double s, const double* x, double* y, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += s * x[i];
}

FGL_AVX2 void three_term(const double* x, const double* v, const double* vprev, double alpha,
                         double beta, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha), vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), va);
    __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(vprev + i));
    _mm256_storeu_pd(out + i, _mm256_fmsub_pd(d, _mm256_loadu_pd(v + i), t));
  }
  for (; i < n; ++i) out[i] = (x[i] - alpha) * v[i] - beta * vprev[i];
}

FGL_AVX2 double cauchy_sum(const double* w, const double* f, const double* x, double z,
                           std::size_t n) {
  const __m256d vz = _mm256_set1_pd(z);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d num = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(f + i));
    __m256d den = _mm256_sub_pd(vz, _mm256_loadu_pd(x + i));
    acc = _mm256_add_pd(acc, _mm256_div_pd(num, den));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * f[i] / (z - x[i]);
  return s;
}

}  // namespace fgl::kernels::avx2

#endif
