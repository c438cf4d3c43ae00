#pragma once

#include <cstddef>

namespace fgl::kernels {

enum class Backend { Scalar, Avx2 };

// Backend used by the dispatching entry points below.
Backend active_backend();
bool avx2_available();
// Forces a backend; requesting Avx2 on a machine without it selects Scalar.
void set_backend(Backend b);

// sum a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);
// sum x[i] * a[i] * b[i]
double dot3(const double* x, const double* a, const double* b, std::size_t n);
// y[i] += s * x[i]
void axpy(double s, const double* x, double* y, std::size_t n);
// out[i] = (x[i] - alpha) * v[i] - beta * vprev[i]
void three_term(const double* x, const double* v, const double* vprev, double alpha, double beta,
                double* out, std::size_t n);
// sum w[i] * f[i] / (z - x[i]) for real z
double cauchy_sum(const double* w, const double* f, const double* x, double z, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double dot3(const double* x, const double* a, const double* b, std::size_t n);
void axpy(double s, const double* x, double* y, std::size_t n);
void three_term(const double* x, const double* v, const double* vprev, double alpha, double beta,
                double* out, std::size_t n);
double cauchy_sum(const double* w, const double* f, const double* x, double z, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(__i386__)
#define FGL_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double dot3(const double* x, const double* a, const double* b, std::size_t n);
void axpy(double s, const double* x, double* y, std::size_t n);
void three_term(const double* x, const double* v, const double* vprev, double alpha, double beta,
                double* out, std::size_t n);
double cauchy_sum(const double* w, const double* f, const double* x, double z, std::size_t n);
}  // namespace avx2
#endif

}  // namespace fgl::kernels
