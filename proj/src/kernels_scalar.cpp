#include "fgl/kernels.hpp"

namespace fgl::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3(const double* x, const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * a[i] * b[i];
  return s;
}

void axpy(double s, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += s * x[i];
}

void three_term(const double* x, const double* v, const double* vprev, double alpha, double beta,
                double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - alpha) * v[i] - beta * vprev[i];
}

double cauchy_sum(const double* w, const double* f, const double* x, double z, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * f[i] / (z - x[i]);
  return s;
}

}  // namespace fgl::kernels::scalar
