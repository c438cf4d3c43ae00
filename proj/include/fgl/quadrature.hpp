#pragma once

#include <functional>
#include <vector>

namespace fgl {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre rule on [-1, 1]; cached per n.
const Rule& gauss_legendre(int n);

// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

// Globally adaptive Gauss-Kronrod integration of a smooth integrand.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-14);

}  // namespace fgl
