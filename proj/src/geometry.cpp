#include "fgl/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fgl/errors.hpp"
#include "fgl/quadrature.hpp"

namespace fgl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSeriesOrder = 48;

double outer_cutoff(const IntervalSystem& sys) { return sys.radius() + 10.0 * sys.width(); }

// Coefficients e_m, m >= 1, of p(x)/sqrt(H(x)) = sum_m e_m x^{-m} near infinity.
std::vector<double> outer_series(const IntervalSystem& sys, const Poly& p, int order) {
  std::vector<double> c = inverse_sqrt_series(sys, order + sys.l + 1);
  std::vector<double> e(order + 1, 0.0);
  for (int m = 1; m <= order; ++m) {
    double s = 0.0;
    for (int i = 0; i <= p.degree(); ++i) {
      int idx = m - sys.l + i;
      if (idx >= 0 && idx < static_cast<int>(c.size())) s += p.coeff(i) * c[idx];
    }
    e[m] = s;
  }
  return e;
}

// Integral of sum_m e_m t^{-m} from u to v, both beyond the cutoff on the same side.
double series_tail(const std::vector<double>& e, double u, double v) {
  double s = 0.0;
  if (e.size() > 1 && e[1] != 0.0) s += e[1] * std::log(std::abs(v) / std::abs(u));
  for (size_t m = 2; m < e.size(); ++m) {
    const double k = 1.0 - static_cast<double>(m);
    double tv = std::isinf(v) ? 0.0 : std::pow(v, k);
    s += e[m] * (tv - std::pow(u, k)) / k;
  }
  return s;
}

// Integral of p/sqrt(H) from the outer endpoint to x, with |x - endpoint| finite and within
// the cutoff.
double outer_near(const IntervalSystem& sys, const Poly& p, double x) {
  const bool right = x >= sys.a.back();
  const double a = right ? sys.a.back() : sys.a.front();
  const int i0 = right ? 2 * sys.l - 2 : 0;
  const double smax = std::sqrt(std::abs(x - a));
  if (smax == 0.0) return 0.0;
  auto f = [&](double s) {
    const double t = right ? a + s * s : a - s * s;
    // Other endpoint of the adjacent band, still a factor of H.
    const double other = right ? (t - sys.a[2 * sys.l - 2]) : (sys.a[1] - t);
    const double rest = std::abs(sys.H_rest(t, i0)) * std::abs(other);
    return 2.0 * p(t) / std::sqrt(rest);
  };
  double v = integrate_adaptive(f, 0.0, smax, 1e-14);
  if (right) return v;
  // Left of a_1: sqrt(H) has sign (-1)^l and dx = -2 s ds.
  const double sign = (sys.l % 2 == 0) ? 1.0 : -1.0;
  return -v / sign;
}

}  // namespace

double IntervalSystem::H_rest(double x, int i0) const {
  double p = 1.0;
  for (int i = 0; i < static_cast<int>(a.size()); ++i)
    if (i != i0 && i != i0 + 1) p *= (x - a[i]);
  return p;
}

double IntervalSystem::radius() const {
  return std::max(std::abs(a.front()), std::abs(a.back()));
}

IntervalSystem build_system(const std::vector<double>& endpoints) {
  if (endpoints.size() < 2 || endpoints.size() % 2 != 0)
    throw InputError("endpoints must have even length >= 2");
  for (size_t i = 0; i < endpoints.size(); ++i) {
    if (!std::isfinite(endpoints[i])) throw InputError("endpoints must be finite");
    if (i > 0 && !(endpoints[i] > endpoints[i - 1]))
      throw InputError("endpoints must be strictly increasing");
  }
  IntervalSystem s;
  s.a = endpoints;
  s.l = static_cast<int>(endpoints.size() / 2);
  s.H = Poly::from_roots(endpoints);
  return s;
}

Location locate(const IntervalSystem& sys, double x) {
  const auto& a = sys.a;
  if (x < a.front()) return {Where::Left, -1};
  if (x > a.back()) return {Where::Right, -1};
  for (int i = 0; i < static_cast<int>(a.size()); ++i)
    if (x == a[i]) return {Where::Endpoint, i};
  for (int k = 0; k < sys.l; ++k)
    if (x > sys.band_lo(k) && x < sys.band_hi(k)) return {Where::Band, k};
  for (int j = 0; j < sys.gaps(); ++j)
    if (x > sys.gap_lo(j) && x < sys.gap_hi(j)) return {Where::Gap, j};
  return {Where::Endpoint, 0};
}

BranchValues branch_values(const IntervalSystem& sys, double x) {
  const Location loc = locate(sys, x);
  const double mag = std::sqrt(std::abs(sys.H(x)));
  switch (loc.where) {
    case Where::Right:
      return {true, mag, 0.0};
    case Where::Left:
      return {true, (sys.l % 2 == 0) ? mag : -mag, 0.0};
    case Where::Gap:
      return {true, sys.gap_sign(loc.index) * mag, 0.0};
    case Where::Band:
      return {false, 0.0, sys.band_sign(loc.index) * mag};
    case Where::Endpoint:
      return {true, 0.0, 0.0};
  }
  return {true, 0.0, 0.0};
}

std::complex<double> sqrtH(const IntervalSystem& sys, std::complex<double> z) {
  // Product of per-band factors (z - m) sqrt(1 - r^2/(z - m)^2), each cut exactly on its band.
  std::complex<double> s = 1.0;
  for (int k = 0; k < sys.l; ++k) {
    const double m = 0.5 * (sys.band_lo(k) + sys.band_hi(k));
    const double r = 0.5 * (sys.band_hi(k) - sys.band_lo(k));
    const std::complex<double> w = z - m;
    if (w == 0.0) {
      s *= std::complex<double>(0.0, r);
      continue;
    }
    std::complex<double> u = 1.0 - (r * r) / (w * w);
    // Keep z just above a cut on the upper side.
    if (u.imag() == 0.0 && u.real() < 0.0) u = std::complex<double>(u.real(), (w.real() >= 0) ? 0.0 : -0.0);
    s *= w * std::sqrt(u);
  }
  return s;
}

std::vector<double> reciprocal_sqrt_series(const IntervalSystem& sys, int order) {
  // H*(u) = u^{2l} H(1/u): coefficients of H from the top down.
  const int deg = 2 * sys.l;
  std::vector<double> P(order + 1, 0.0);
  for (int m = 0; m <= std::min(order, deg); ++m) P[m] = sys.H.coeff(deg - m);
  std::vector<double> s(order + 1, 0.0);
  s[0] = 1.0;
  for (int n = 1; n <= order; ++n) {
    double acc = P[n];
    for (int k = 1; k < n; ++k) acc -= s[k] * s[n - k];
    s[n] = 0.5 * acc;
  }
  return s;
}

std::vector<double> inverse_sqrt_series(const IntervalSystem& sys, int order) {
  std::vector<double> h = reciprocal_sqrt_series(sys, order);
  std::vector<double> c(order + 1, 0.0);
  c[0] = 1.0;
  for (int n = 1; n <= order; ++n) {
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += h[k] * c[n - k];
    c[n] = -acc;
  }
  return c;
}

double gap_arc_x(const IntervalSystem& sys, int j, double t) {
  const double lo = sys.gap_lo(j), hi = sys.gap_hi(j);
  return 0.5 * (lo + hi) - 0.5 * (hi - lo) * std::cos(t);
}

double gap_arc_weight(const IntervalSystem& sys, int j, double t) {
  const double x = gap_arc_x(sys, j, t);
  return 1.0 / (sys.gap_sign(j) * std::sqrt(std::abs(sys.H_rest(x, 2 * j + 1))));
}

double gap_angle(const IntervalSystem& sys, int j, double y) {
  const double lo = sys.gap_lo(j), hi = sys.gap_hi(j);
  const double u = std::clamp((0.5 * (lo + hi) - y) / (0.5 * (hi - lo)), -1.0, 1.0);
  // acos loses accuracy near +/-1; use the half-angle form there.
  if (u > 0.5) return 2.0 * std::asin(std::sqrt(std::max(0.0, (y - lo) / (hi - lo))));
  if (u < -0.5) return kPi - 2.0 * std::asin(std::sqrt(std::max(0.0, (hi - y) / (hi - lo))));
  return std::acos(u);
}

std::vector<double> gap_moments(const IntervalSystem& sys, int j, double theta, int max_pow,
                                int nodes) {
  std::vector<double> out(max_pow + 1, 0.0);
  if (theta == 0.0) return out;
  const Rule& r = gauss_legendre(nodes);
  const double half = 0.5 * theta;
  for (int i = 0; i < nodes; ++i) {
    const double t = half * (1.0 + r.x[i]);
    const double x = gap_arc_x(sys, j, t);
    double f = r.w[i] * half * gap_arc_weight(sys, j, t);
    for (int m = 0; m <= max_pow; ++m) {
      out[m] += f;
      f *= x;
    }
  }
  return out;
}

std::vector<double> band_moments_over_h(const IntervalSystem& sys, int k, int max_pow, int nodes) {
  std::vector<double> out(max_pow + 1, 0.0);
  const double lo = sys.band_lo(k), hi = sys.band_hi(k);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int i = 0; i < nodes; ++i) {
    const double t = (i + 0.5) * kPi / nodes;
    const double x = mid + half * std::cos(t);
    double f = (kPi / nodes) / (sys.band_sign(k) * std::sqrt(std::abs(sys.H_rest(x, 2 * k))));
    for (int m = 0; m <= max_pow; ++m) {
      out[m] += f;
      f *= x;
    }
  }
  return out;
}

double outer_integral(const IntervalSystem& sys, const Poly& p, double x) {
  const bool right = x >= sys.a.back();
  if (!right && !(x <= sys.a.front())) throw DomainError("outer_integral: x not outside E");
  if (std::isinf(x) && p.degree() > sys.l - 2)
    throw DomainError("outer_integral: divergent integral at infinity");
  const double X = outer_cutoff(sys);
  const double edge = right ? X : -X;
  if (std::abs(x) <= X) return outer_near(sys, p, x);
  const std::vector<double> e = outer_series(sys, p, kSeriesOrder);
  return outer_near(sys, p, edge) + series_tail(e, edge, x);
}

EquilibriumData equilibrium(const IntervalSystem& sys, int nodes) {
  if (nodes < 16) throw InputError("equilibrium: nodes_per_band must be >= 16");
  const int l = sys.l;
  const int g = l - 1;
  EquilibriumData eq;
  eq.nodes = nodes;

  if (g > 0) {
    Eigen::MatrixXd M(g, l);
    for (int j = 0; j < g; ++j) {
      std::vector<double> mom = gap_moments(sys, j, kPi, l - 1, nodes);
      for (int i = 0; i < l; ++i) M(j, i) = mom[i];
    }
    Eigen::MatrixXd A = M.leftCols(g);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    eq.condition = sv(0) / sv(g - 1);
    if (!(eq.condition < 1e13))
      throw NumericError("equilibrium: singular gap-condition system, condition estimate " +
                         std::to_string(eq.condition));
    auto lu = A.fullPivLu();
    Eigen::VectorXd q = lu.solve(-M.col(g));
    std::vector<double> rc(l);
    for (int i = 0; i < g; ++i) rc[i] = q(i);
    rc[g] = 1.0;
    eq.r = Poly(rc);
    for (int k = 0; k < g; ++k) {
      Eigen::VectorXd b = Eigen::VectorXd::Zero(g);
      for (int m = 0; m < g; ++m) b(m) = (m + 1 == k ? 1.0 : 0.0) - (m == k ? 1.0 : 0.0);
      Eigen::VectorXd p = lu.solve(b);
      eq.pi.emplace_back(std::vector<double>(p.data(), p.data() + g));
    }
    // One root of r per gap: locate by sign change and polish by bisection.
    for (int j = 0; j < g; ++j) {
      double lo = sys.gap_lo(j), hi = sys.gap_hi(j);
      double flo = eq.r(lo);
      if (flo * eq.r(hi) > 0.0) throw NumericError("equilibrium: r has no root in a gap");
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = eq.r(mid);
        if ((fm <= 0.0) == (flo <= 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      eq.c.push_back(0.5 * (lo + hi));
    }
  } else {
    eq.r = Poly({1.0});
  }

  // Band route for omega(infinity).
  eq.omega_inf.resize(l);
  for (int k = 0; k < l; ++k) {
    std::vector<double> mom = band_moments_over_h(sys, k, l - 1, nodes);
    double s = 0.0;
    for (int i = 0; i < l; ++i) s += eq.r.coeff(i) * mom[i];
    eq.omega_inf[k] = s / kPi;
  }
  // Tail route.
  eq.omega_inf_tail.assign(l, 0.0);
  double acc = 0.0;
  for (int k = 0; k < g; ++k) {
    eq.omega_inf_tail[k] =
        outer_integral(sys, eq.pi[k], std::numeric_limits<double>::infinity());
    acc += eq.omega_inf_tail[k];
  }
  eq.omega_inf_tail[l - 1] = 1.0 - acc;
  for (int k = 0; k < l; ++k)
    if (std::abs(eq.omega_inf[k] - eq.omega_inf_tail[k]) > 1e-8)
      throw NumericError("equilibrium: omega(infinity) routes disagree");

  // log cap = log X - int_{a_2l}^X r/sqrt(H) - series tail beyond X.
  const double X = outer_cutoff(sys);
  const std::vector<double> e = outer_series(sys, eq.r, kSeriesOrder);
  double tail = 0.0;
  for (size_t m = 2; m < e.size(); ++m) {
    const double k = static_cast<double>(m) - 1.0;
    tail += e[m] * std::pow(X, -k) / k;
  }
  eq.capacity = std::exp(std::log(X) - outer_near(sys, eq.r, X) - tail);
  return eq;
}

std::vector<double> harmonic_measure(const EquilibriumData& eq, const IntervalSystem& sys,
                                     double x) {
  const int l = sys.l;
  std::vector<double> w(l, 0.0);
  if (std::isinf(x)) return eq.omega_inf;
  const Location loc = locate(sys, x);
  if (loc.where == Where::Band) throw DomainError("harmonic_measure: x inside a band");
  if (loc.where == Where::Endpoint) {
    w[loc.index / 2] = 1.0;
    return w;
  }
  int base;
  std::vector<double> integral(l - 1, 0.0);
  if (loc.where == Where::Gap) {
    const int j = loc.index;
    base = j;
    const double theta = gap_angle(sys, j, x);
    std::vector<double> mom = gap_moments(sys, j, theta, std::max(l - 2, 0), eq.nodes);
    for (int k = 0; k < l - 1; ++k)
      for (int i = 0; i <= eq.pi[k].degree(); ++i) integral[k] += eq.pi[k].coeff(i) * mom[i];
  } else {
    base = (loc.where == Where::Right) ? l - 1 : 0;
    for (int k = 0; k < l - 1; ++k) integral[k] = outer_integral(sys, eq.pi[k], x);
  }
  double acc = 0.0;
  for (int k = 0; k < l - 1; ++k) {
    w[k] = (k == base ? 1.0 : 0.0) + integral[k];
    acc += w[k];
  }
  w[l - 1] = 1.0 - acc;
  return w;
}

double green_log_phi(const EquilibriumData& eq, const IntervalSystem& sys, double x) {
  const Location loc = locate(sys, x);
  if (loc.where == Where::Band) throw DomainError("green_log_phi: x inside a band");
  if (loc.where == Where::Endpoint) return 0.0;
  if (loc.where == Where::Gap) {
    const int j = loc.index;
    const double theta = gap_angle(sys, j, x);
    std::vector<double> mom = gap_moments(sys, j, theta, sys.l - 1, eq.nodes);
    double s = 0.0;
    for (int i = 0; i < sys.l; ++i) s += eq.r.coeff(i) * mom[i];
    return s;
  }
  return outer_integral(sys, eq.r, x);
}

double equilibrium_density(const EquilibriumData& eq, const IntervalSystem& sys, double x) {
  const BranchValues b = branch_values(sys, x);
  if (b.real) return 0.0;
  return eq.r(x) / (kPi * b.h);
}

}  // namespace fgl
