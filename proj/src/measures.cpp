#include "fgl/measures.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>

#include "fgl/errors.hpp"

namespace fgl {

namespace {

constexpr double kPi = std::numbers::pi;

bool in_closed_band(const IntervalSystem& sys, double x) {
  for (int k = 0; k < sys.l; ++k)
    if (x >= sys.band_lo(k) && x <= sys.band_hi(k)) return true;
  return false;
}

// Band node in the cosine angle with accurate distances to both band ends.
struct BandNode {
  double x, to_lo, to_hi, sin_t;
};

BandNode band_node(const IntervalSystem& sys, int k, int i, int n) {
  const double lo = sys.band_lo(k), hi = sys.band_hi(k);
  const double half = 0.5 * (hi - lo);
  const double t = (i + 0.5) * kPi / n;
  const double c = std::cos(0.5 * t), s = std::sin(0.5 * t);
  return {0.5 * (lo + hi) + half * std::cos(t), 2.0 * half * c * c, 2.0 * half * s * s,
          std::sin(t)};
}

// prod_j (x - y_j) with exact band-edge factors when y_j sits on an end of band k.
double divisor_poly_at(const IntervalSystem& sys, const GapDivisor& div, int k, const BandNode& b) {
  double g = 1.0;
  for (const auto& p : div) {
    if (p.y == sys.band_lo(k)) g *= b.to_lo;
    else if (p.y == sys.band_hi(k)) g *= -b.to_hi;
    else g *= (b.x - p.y);
  }
  return g;
}

double divisor_poly_at(const GapDivisor& div, double x) {
  double g = 1.0;
  for (const auto& p : div) g *= (x - p.y);
  return g;
}

double divisor_poly_derivative(const GapDivisor& div, int j) {
  double d = 1.0;
  for (int i = 0; i < static_cast<int>(div.size()); ++i)
    if (i != j) d *= (div[j].y - div[i].y);
  return d;
}

}  // namespace

MeasureSpec make_equilibrium_spec(const IntervalSystem& sys, const EquilibriumData& eq) {
  MeasureSpec s;
  s.system = sys;
  s.eq = eq;
  s.kind = WeightKind::Equilibrium;
  validate(s);
  return s;
}

MeasureSpec make_poly_spec(const IntervalSystem& sys, const EquilibriumData& eq, const Poly& q) {
  MeasureSpec s;
  s.system = sys;
  s.eq = eq;
  s.kind = WeightKind::PolyTimesEquilibrium;
  s.q = q;
  validate(s);
  return s;
}

MeasureSpec make_isospectral(const IntervalSystem& sys, const EquilibriumData& eq,
                             const GapDivisor& div) {
  if (sys.l < 2) throw DomainError("make_isospectral: needs at least two bands");
  validate_divisor(sys, div);
  MeasureSpec s;
  s.system = sys;
  s.eq = eq;
  s.kind = WeightKind::Isospectral;
  s.divisor = div;
  for (int j = 0; j < static_cast<int>(div.size()); ++j) {
    if (div[j].delta != 1) continue;
    // Residue of (F - sqrt(H))/(2G) at y_j, using F(y_j) = -delta_j sqrt(H(y_j)).
    const double root = branch_values(sys, div[j].y).sqrtH;
    const double mass = -root / divisor_poly_derivative(div, j);
    if (!(mass > 0.0))
      throw ConventionError("make_isospectral: non-positive atom under the branch convention");
    s.torus_masses.push_back({div[j].y, mass});
  }
  validate(s);
  return s;
}

MeasureSpec with_point_mass(MeasureSpec spec, double position, double mass) {
  spec.point_masses.push_back({position, mass});
  validate(spec);
  return spec;
}

void validate(const MeasureSpec& spec) {
  const IntervalSystem& sys = spec.system;
  std::vector<double> positions;
  for (const auto& pm : spec.point_masses) {
    if (!std::isfinite(pm.position) || !(pm.mass > 0.0) || !std::isfinite(pm.mass))
      throw InputError("point mass must have finite position and positive mass");
    if (in_closed_band(sys, pm.position)) throw InputError("point mass lies on E");
    positions.push_back(pm.position);
  }
  for (const auto& pm : spec.torus_masses) positions.push_back(pm.position);
  std::sort(positions.begin(), positions.end());
  if (std::adjacent_find(positions.begin(), positions.end()) != positions.end())
    throw InputError("point masses must be at distinct positions");

  if (spec.kind == WeightKind::PolyTimesEquilibrium) {
    const double lo = sys.a.front(), hi = sys.a.back();
    for (int i = 0; i <= 4096; ++i)
      if (!(spec.q(lo + (hi - lo) * i / 4096.0) > 0.0))
        throw InputError("weight polynomial must be positive on the hull of E");
    for (auto z : roots(spec.q))
      if (std::abs(z.imag()) < 1e-12 && z.real() >= lo && z.real() <= hi)
        throw InputError("weight polynomial has a root on the hull of E");
  }
  if (spec.kind == WeightKind::Isospectral) {
    validate_divisor(sys, spec.divisor);
    for (int k = 0; k < sys.l; ++k)
      for (int i = 0; i < 256; ++i) {
        BandNode b = band_node(sys, k, i, 256);
        const double h = sys.band_sign(k) * std::sqrt(std::abs(sys.H_rest(b.x, 2 * k) * b.to_lo * b.to_hi));
        if (h / divisor_poly_at(sys, spec.divisor, k, b) < 0.0)
          throw ConventionError("isospectral density negative under the branch convention");
      }
  }
}

double ac_density(const MeasureSpec& spec, double x) {
  const BranchValues b = branch_values(spec.system, x);
  if (b.real) return 0.0;
  switch (spec.kind) {
    case WeightKind::Equilibrium:
      return spec.eq.r(x) / (kPi * b.h);
    case WeightKind::PolyTimesEquilibrium:
      return spec.q(x) * spec.eq.r(x) / (kPi * b.h);
    case WeightKind::Isospectral:
      return b.h / (2.0 * kPi * divisor_poly_at(spec.divisor, x));
  }
  return 0.0;
}

DiscreteMeasure discretize(const MeasureSpec& spec, int n) {
  if (n < 32) throw InputError("discretize: nodes_per_band must be >= 32");
  const IntervalSystem& sys = spec.system;
  DiscreteMeasure dm;
  for (int k = 0; k < sys.l; ++k) {
    const double half = 0.5 * (sys.band_hi(k) - sys.band_lo(k));
    // Ascending nodes: the angle runs from pi down to 0.
    for (int i = n - 1; i >= 0; --i) {
      const BandNode b = band_node(sys, k, i, n);
      const double rest = std::sqrt(std::abs(sys.H_rest(b.x, 2 * k)));
      double w = 0.0;
      if (spec.kind == WeightKind::Isospectral) {
        // (pi/n) * h/(2 pi G) * dx/dtheta with h = s rest half sin, dx/dtheta = half sin.
        w = half * half * b.sin_t * b.sin_t * sys.band_sign(k) * rest /
            (2.0 * n * divisor_poly_at(sys, spec.divisor, k, b));
      } else {
        w = spec.eq.r(b.x) / (n * sys.band_sign(k) * rest);
        if (spec.kind == WeightKind::PolyTimesEquilibrium) w *= spec.q(b.x);
      }
      dm.nodes.push_back(b.x);
      dm.weights.push_back(w);
    }
  }
  dm.ac_nodes = static_cast<int>(dm.nodes.size());
  for (const auto* list : {&spec.torus_masses, &spec.point_masses})
    for (const auto& pm : *list) {
      dm.nodes.push_back(pm.position);
      dm.weights.push_back(pm.mass);
    }
  double total = 0.0;
  for (double w : dm.weights) {
    if (!(w > 0.0)) throw NumericError("discretize: non-positive quadrature weight");
    total += w;
  }
  dm.total_mass = total;
  return dm;
}

std::complex<double> markov(const DiscreteMeasure& dm, std::complex<double> z) {
  std::complex<double> s = 0.0;
  for (size_t k = 0; k < dm.nodes.size(); ++k) s += dm.weights[k] / (z - dm.nodes[k]);
  return s;
}

SzegoResult szego_integral(const IntervalSystem& sys, const EquilibriumData& eq,
                           const std::function<double(double)>& density, int n) {
  SzegoResult res;
  int vanishing = 0, total = 0;
  double s = 0.0;
  for (int k = 0; k < sys.l; ++k)
    for (int i = 0; i < n; ++i) {
      const BandNode b = band_node(sys, k, i, n);
      const double rest = std::sqrt(std::abs(sys.H_rest(b.x, 2 * k)));
      const double rho_w = eq.r(b.x) / (n * sys.band_sign(k) * rest);
      const double w = density(b.x);
      ++total;
      if (!(w > 1e-300)) {
        ++vanishing;
        continue;
      }
      s += rho_w * std::log(w);
    }
  if (vanishing > total / 100) {
    res.minus_infinity = true;
    res.value = -std::numeric_limits<double>::infinity();
    return res;
  }
  res.value = s;
  return res;
}

SzegoResult szego_integral(const MeasureSpec& spec, int n) {
  return szego_integral(spec.system, spec.eq, [&](double x) { return ac_density(spec, x); }, n);
}

RecurrenceTable strip(const RecurrenceTable& rt, int m) {
  if (m < 0 || m >= rt.N) throw InputError("strip: m must satisfy 0 <= m < N");
  RecurrenceTable out;
  out.alpha.assign(rt.alpha.begin() + m, rt.alpha.end());
  out.lambda.assign(rt.lambda.begin() + m, rt.lambda.end());
  out.N = rt.N - m;
  return out;
}

}  // namespace fgl
