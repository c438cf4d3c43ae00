#pragma once

#include <complex>
#include <vector>

namespace fgl {

// Real polynomial, coefficients in ascending powers.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<double> coeffs);

  static Poly constant(double c);
  static Poly from_roots(const std::vector<double>& roots);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coeffs() const { return c_; }
  double coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : 0.0; }
  double leading() const { return c_.empty() ? 0.0 : c_.back(); }

  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> z) const;

  Poly derivative() const;
  Poly scaled(double s) const;
  // Drops leading coefficients with |c| <= tol * max|c|.
  Poly trimmed(double tol = 0.0) const;

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);

  double sup_norm_coeffs() const;

 private:
  std::vector<double> c_;
};

struct DivMod {
  Poly quotient;
  Poly remainder;
};

// Synthetic long division by a polynomial with nonzero leading coefficient.
DivMod divmod(const Poly& num, const Poly& den);

// All complex roots via companion-matrix eigenvalues.
std::vector<std::complex<double>> roots(const Poly& p);

// Max |p(x)| over a uniform sample of [a, b].
double sup_norm_on(const Poly& p, double a, double b, int samples = 2001);

}  // namespace fgl
