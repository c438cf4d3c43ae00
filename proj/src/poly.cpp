#include "fgl/poly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fgl/errors.hpp"

namespace fgl {

Poly::Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_.push_back(0.0);
}

Poly Poly::constant(double c) { return Poly({c}); }

Poly Poly::from_roots(const std::vector<double>& roots) {
  std::vector<double> c{1.0};
  for (double r : roots) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  return Poly(std::move(c));
}

double Poly::operator()(double x) const {
  double s = 0.0;
  for (size_t i = c_.size(); i-- > 0;) s = s * x + c_[i];
  return s;
}

std::complex<double> Poly::operator()(std::complex<double> z) const {
  std::complex<double> s = 0.0;
  for (size_t i = c_.size(); i-- > 0;) s = s * z + c_[i];
  return s;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly({0.0});
  std::vector<double> d(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
  return Poly(std::move(d));
}

Poly Poly::scaled(double s) const {
  std::vector<double> c = c_;
  for (double& v : c) v *= s;
  return Poly(std::move(c));
}

Poly Poly::trimmed(double tol) const {
  double m = sup_norm_coeffs();
  std::vector<double> c = c_;
  while (c.size() > 1 && std::abs(c.back()) <= tol * m) c.pop_back();
  return Poly(std::move(c));
}

double Poly::sup_norm_coeffs() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
  return Poly(std::move(c));
}

Poly operator-(const Poly& a, const Poly& b) { return a + b.scaled(-1.0); }

Poly operator*(const Poly& a, const Poly& b) {
  std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
  for (size_t i = 0; i < a.c_.size(); ++i)
    for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Poly(std::move(c));
}

DivMod divmod(const Poly& num, const Poly& den) {
  const int dn = den.degree();
  const double lead = den.leading();
  if (lead == 0.0) throw NumericError("divmod: zero leading coefficient");
  std::vector<double> r = num.coeffs();
  const int nn = num.degree();
  if (nn < dn) return {Poly({0.0}), num};
  std::vector<double> q(nn - dn + 1, 0.0);
  for (int k = nn - dn; k >= 0; --k) {
    const double t = r[k + dn] / lead;
    q[k] = t;
    for (int i = 0; i <= dn; ++i) r[k + i] -= t * den.coeff(i);
    r[k + dn] = 0.0;
  }
  r.resize(std::max(dn, 1));
  return {Poly(std::move(q)), Poly(std::move(r))};
}

std::vector<std::complex<double>> roots(const Poly& p) {
  Poly q = p.trimmed();
  const int n = q.degree();
  if (n <= 0) return {};
  if (n == 1) return {std::complex<double>(-q.coeff(0) / q.coeff(1), 0.0)};
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -q.coeff(i) / q.leading();
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  std::vector<std::complex<double>> out(n);
  for (int i = 0; i < n; ++i) {
    // One Newton polish step on the original polynomial.
    std::complex<double> z = es.eigenvalues()[i];
    const Poly d = q.derivative();
    for (int it = 0; it < 3; ++it) {
      std::complex<double> dz = d(z);
      if (std::abs(dz) == 0.0) break;
      z -= q(z) / dz;
    }
    out[i] = z;
  }
  return out;
}

double sup_norm_on(const Poly& p, double a, double b, int samples) {
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    double x = a + (b - a) * i / (samples - 1);
    m = std::max(m, std::abs(p(x)));
  }
  return m;
}

}  // namespace fgl
