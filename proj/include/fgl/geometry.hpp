#pragma once

#include <complex>
#include <vector>

#include "fgl/poly.hpp"

namespace fgl {

// Band set E = union of [a[2k], a[2k+1]], k = 0..l-1. Bands and gaps are 0-based:
// band k = [a[2k], a[2k+1]], gap j = (a[2j+1], a[2j+2]) for j = 0..l-2.
struct IntervalSystem {
  std::vector<double> a;
  int l = 0;
  Poly H;

  double band_lo(int k) const { return a[2 * k]; }
  double band_hi(int k) const { return a[2 * k + 1]; }
  double gap_lo(int j) const { return a[2 * j + 1]; }
  double gap_hi(int j) const { return a[2 * j + 2]; }
  int gaps() const { return l - 1; }

  // Sign of h on band k and of sqrt(H) on gap j.
  int band_sign(int k) const { return ((l - 1 - k) % 2 == 0) ? 1 : -1; }
  int gap_sign(int j) const { return ((l - 1 - j) % 2 == 0) ? 1 : -1; }

  // prod_{i != i0, i0+1} (x - a[i]).
  double H_rest(double x, int i0) const;
  // Max |a|, total width a_{2l} - a_1.
  double radius() const;
  double width() const { return a.back() - a.front(); }
};

IntervalSystem build_system(const std::vector<double>& endpoints);

enum class Where { Left, Band, Gap, Right, Endpoint };

struct Location {
  Where where;
  int index;  // band, gap, or endpoint index
};

Location locate(const IntervalSystem& sys, double x);

struct BranchValues {
  bool real;     // sqrt(H) real (x outside the open bands)
  double sqrtH;  // signed real branch, 0 on bands
  double h;      // signed band value, 0 off bands
};

BranchValues branch_values(const IntervalSystem& sys, double x);

// Analytic branch of sqrt(H) on C minus E, positive right of a_{2l}.
std::complex<double> sqrtH(const IntervalSystem& sys, std::complex<double> z);

// Coefficients c_j with 1/sqrt(H(z)) = sum_j c_j z^{-(l+j)} near infinity.
std::vector<double> inverse_sqrt_series(const IntervalSystem& sys, int order);
// Coefficients h_j with sqrt(H*(x)) = sum_j h_j x^j near 0, H*(x) = x^{2l} H(1/x).
std::vector<double> reciprocal_sqrt_series(const IntervalSystem& sys, int order);

// Gap arc x = mid - half cos t, t in [0, pi]; dx/sqrt(H) = gap_arc_weight dt.
double gap_arc_x(const IntervalSystem& sys, int j, double t);
double gap_arc_weight(const IntervalSystem& sys, int j, double t);
// Integrals of x^m dx/sqrt(H) from gap_lo(j) to x(theta), m = 0..max_pow.
std::vector<double> gap_moments(const IntervalSystem& sys, int j, double theta, int max_pow,
                                int nodes);
// Integrals of x^m dx/h over band k, m = 0..max_pow (Gauss-Chebyshev in the angle).
std::vector<double> band_moments_over_h(const IntervalSystem& sys, int k, int max_pow, int nodes);
// Integral of p/sqrt(H) from the nearest outer endpoint to x (x right of a_{2l} or left of
// a_1). x may be +/-infinity when deg p <= l-2.
double outer_integral(const IntervalSystem& sys, const Poly& p, double x);
// Angle of y on gap j with x(theta) = y, theta in [0, pi].
double gap_angle(const IntervalSystem& sys, int j, double y);

struct EquilibriumData {
  Poly r;                                // r_infinity, monic degree l-1
  std::vector<double> c;                 // roots of r, one per gap
  double capacity = 0.0;
  std::vector<double> omega_inf;         // band route, length l
  std::vector<double> omega_inf_tail;    // tail route, length l
  std::vector<Poly> pi;                  // l-1 polynomials of degree <= l-2
  double condition = 1.0;                // of the gap-condition system
  int nodes = 0;
};

EquilibriumData equilibrium(const IntervalSystem& sys, int nodes_per_band = 64);

// omega_k(x) for x off the open bands, or x = +/-infinity.
std::vector<double> harmonic_measure(const EquilibriumData& eq, const IntervalSystem& sys,
                                     double x);

// g(x, infinity) for x real off the open bands.
double green_log_phi(const EquilibriumData& eq, const IntervalSystem& sys, double x);

// Equilibrium density r/(pi h) at x inside a band (0 elsewhere).
double equilibrium_density(const EquilibriumData& eq, const IntervalSystem& sys, double x);

}  // namespace fgl
