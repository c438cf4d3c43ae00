#include "fgl/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fgl/errors.hpp"

namespace fgl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEdgeAngle = 1e-9;

// Phi(j, theta)_k = integral of phi_k from gap_lo(j) along the gap arc, theta in [0, 2pi).
Eigen::VectorXd arc_integral(const RiemannData& rd, const IntervalSystem& sys, int j,
                             double theta) {
  const int g = sys.gaps();
  auto half_loop = [&](double th) {
    std::vector<double> mom = gap_moments(sys, j, th, g - 1, rd.nodes);
    Eigen::VectorXd v(g);
    for (int k = 0; k < g; ++k) {
      double s = 0.0;
      for (int i = 0; i < g; ++i) s += rd.e(k, i) * mom[i];
      v(k) = s;
    }
    return v;
  };
  if (theta <= kPi) return half_loop(theta);
  return 2.0 * rd.full_gap.row(j).transpose() - half_loop(kTwoPi - theta);
}

// Per-gap Abel contribution as a function of the loop angle.
Eigen::VectorXd gap_contribution(const RiemannData& rd, const IntervalSystem& sys, int j,
                                 double theta) {
  Eigen::VectorXd v = rd.full_gap.row(j).transpose() - arc_integral(rd, sys, j, theta);
  if (j + 1 < sys.gaps()) v += 0.5 * rd.B.col(j + 1);
  return v;
}

Eigen::VectorXd wrap_centered(Eigen::VectorXd v) {
  for (int i = 0; i < v.size(); ++i) v(i) -= std::round(v(i));
  return v;
}

}  // namespace

double dist_mod1(double x) { return std::abs(x - std::round(x)); }

void validate_divisor(const IntervalSystem& sys, const GapDivisor& div) {
  if (static_cast<int>(div.size()) != sys.gaps())
    throw InputError("divisor must have one entry per gap");
  for (int j = 0; j < sys.gaps(); ++j) {
    const auto& p = div[j];
    const bool edge = p.y == sys.gap_lo(j) || p.y == sys.gap_hi(j);
    if (!(p.y >= sys.gap_lo(j) && p.y <= sys.gap_hi(j)))
      throw InputError("divisor point outside its gap closure");
    if (p.delta < -1 || p.delta > 1) throw InputError("divisor sign must be -1, 0 or +1");
    if (edge != (p.delta == 0))
      throw InputError("divisor sign must be 0 exactly at gap endpoints");
  }
}

double divisor_angle(const IntervalSystem& sys, int j, const DivisorPoint& p) {
  const double t = gap_angle(sys, j, p.y);
  if (p.delta < 0) return kTwoPi - t;
  return t;
}

DivisorPoint divisor_from_angle(const IntervalSystem& sys, int j, double theta) {
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  if (theta < kEdgeAngle || kTwoPi - theta < kEdgeAngle) return {sys.gap_lo(j), 0};
  if (std::abs(theta - kPi) < kEdgeAngle) return {sys.gap_hi(j), 0};
  double y = gap_arc_x(sys, j, theta);
  y = std::clamp(y, std::nextafter(sys.gap_lo(j), sys.gap_hi(j)),
                 std::nextafter(sys.gap_hi(j), sys.gap_lo(j)));
  return {y, theta < kPi ? 1 : -1};
}

RiemannData riemann_data(const IntervalSystem& sys, int nodes) {
  const int g = sys.gaps();
  if (g < 1) throw DomainError("riemann_data: genus zero (single band)");
  RiemannData rd;
  rd.nodes = nodes;
  // A(j, s) = integral over band j of x^s / h.
  Eigen::MatrixXd A(g, g);
  for (int j = 0; j < g; ++j) {
    std::vector<double> mom = band_moments_over_h(sys, j, g - 1, nodes);
    for (int s = 0; s < g; ++s) A(j, s) = mom[s];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const double cond = svd.singularValues()(0) / svd.singularValues()(g - 1);
  if (!(cond < 1e13))
    throw NumericError("riemann_data: ill-conditioned normalization, condition " +
                       std::to_string(cond));
  // Over band j the boundary value of sqrt(H) is i h, so the alpha period is 2 i times the
  // band integral of p/h; e A^T = -pi I normalizes it to 2 pi i.
  rd.e = -kPi * A.transpose().fullPivLu().inverse();
  rd.full_gap.resize(g, g);
  for (int j = 0; j < g; ++j) {
    std::vector<double> mom = gap_moments(sys, j, kPi, g - 1, nodes);
    for (int k = 0; k < g; ++k) {
      double s = 0.0;
      for (int i = 0; i < g; ++i) s += rd.e(k, i) * mom[i];
      rd.full_gap(j, k) = s;
    }
  }
  rd.B.resize(g, g);
  for (int j = 0; j < g; ++j)
    for (int k = 0; k < g; ++k) {
      double s = 0.0;
      for (int m = j; m < g; ++m) s += rd.full_gap(m, k);
      rd.B(j, k) = 2.0 * s;
    }
  const double asym = (rd.B - rd.B.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * std::max(1.0, rd.B.cwiseAbs().maxCoeff()))
    throw NumericError("riemann_data: period matrix not symmetric");
  rd.B = 0.5 * (rd.B + rd.B.transpose());
  rd.Binv = rd.B.inverse();
  return rd;
}

Eigen::MatrixXd alpha_periods(const RiemannData& rd, const IntervalSystem& sys, int nodes) {
  const int g = sys.gaps();
  Eigen::MatrixXd P(g, g);
  for (int j = 0; j < g; ++j) {
    std::vector<double> mom = band_moments_over_h(sys, j, g - 1, nodes);
    for (int k = 0; k < g; ++k) {
      double s = 0.0;
      for (int i = 0; i < g; ++i) s += rd.e(k, i) * mom[i];
      // 2 i * (-s) / (2 pi i) with the orientation that makes the diagonal +1.
      P(j, k) = -s / kPi;
    }
  }
  return P;
}

Eigen::VectorXd abel_map(const RiemannData& rd, const IntervalSystem& sys, const GapDivisor& div) {
  validate_divisor(sys, div);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(sys.gaps());
  for (int j = 0; j < sys.gaps(); ++j) v += gap_contribution(rd, sys, j, divisor_angle(sys, j, div[j]));
  return v;
}

Eigen::VectorXd torus_coords(const RiemannData& rd, const Eigen::VectorXd& v) {
  Eigen::VectorXd t = rd.Binv * v;
  for (int i = 0; i < t.size(); ++i) {
    t(i) -= std::floor(t(i));
    if (t(i) >= 1.0) t(i) = 0.0;
  }
  return t;
}

GapDivisor jacobi_invert(const RiemannData& rd, const IntervalSystem& sys,
                         const Eigen::VectorXd& t) {
  const int g = sys.gaps();
  if (g < 1) throw DomainError("jacobi_invert: genus zero");
  if (t.size() != g) throw InputError("jacobi_invert: wrong torus dimension");

  auto residual = [&](const std::vector<double>& th) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(g);
    for (int j = 0; j < g; ++j) v += gap_contribution(rd, sys, j, th[j]);
    return wrap_centered(rd.Binv * v - t);
  };
  auto jacobian = [&](const std::vector<double>& th) {
    Eigen::MatrixXd J(g, g);
    for (int j = 0; j < g; ++j) {
      const double x = gap_arc_x(sys, j, th[j]);
      const double w = gap_arc_weight(sys, j, th[j]);
      for (int k = 0; k < g; ++k) {
        double num = 0.0;
        for (int i = g - 1; i >= 0; --i) num = num * x + rd.e(k, i);
        J(k, j) = -num * w;
      }
    }
    return Eigen::MatrixXd(rd.Binv * J);
  };

  // Multi-start grid.
  const int per = 32;
  int total = 1;
  for (int j = 0; j < g; ++j) total *= per;
  std::vector<std::pair<double, std::vector<double>>> starts;
  starts.reserve(total);
  for (int idx = 0; idx < total; ++idx) {
    std::vector<double> th(g);
    int r = idx;
    for (int j = 0; j < g; ++j) {
      th[j] = (r % per + 0.5) * kTwoPi / per;
      r /= per;
    }
    starts.emplace_back(residual(th).norm(), th);
  }
  std::sort(starts.begin(), starts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double best = 1e300;
  std::vector<double> best_th;
  for (int s = 0; s < std::min<int>(8, starts.size()); ++s) {
    std::vector<double> th = starts[s].second;
    Eigen::VectorXd F = residual(th);
    double fn = F.norm();
    for (int it = 0; it < 60 && fn > 1e-15; ++it) {
      Eigen::VectorXd step = jacobian(th).fullPivLu().solve(-F);
      double lam = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 30; ++ls) {
        std::vector<double> trial = th;
        for (int j = 0; j < g; ++j) {
          trial[j] = std::fmod(trial[j] + lam * step(j), kTwoPi);
          if (trial[j] < 0.0) trial[j] += kTwoPi;
        }
        Eigen::VectorXd Ft = residual(trial);
        if (Ft.norm() < fn) {
          th = trial;
          F = Ft;
          fn = Ft.norm();
          moved = true;
          break;
        }
        lam *= 0.5;
      }
      if (!moved) break;
    }
    if (fn < best) {
      best = fn;
      best_th = th;
    }
    if (best < 1e-12) break;
  }
  if (!(best < 1e-11))
    throw NumericError("jacobi_invert: Newton failed, best residual " + std::to_string(best));
  GapDivisor div(g);
  for (int j = 0; j < g; ++j) div[j] = divisor_from_angle(sys, j, best_th[j]);
  return div;
}

double check_abel_consistency(const RiemannData& rd, const EquilibriumData& eq,
                              const IntervalSystem& sys, const GapDivisor& div) {
  validate_divisor(sys, div);
  for (const auto& p : div)
    if (p.delta == 0) throw DomainError("check_abel_consistency: endpoint divisor");
  const int g = sys.gaps();
  Eigen::VectorXd lhs = Eigen::VectorXd::Zero(g);
  for (int j = 0; j < g; ++j) {
    std::vector<double> w = harmonic_measure(eq, sys, div[j].y);
    for (int k = 0; k < g; ++k) lhs(k) += 0.5 * div[j].delta * w[k];
  }
  Eigen::VectorXd t = torus_coords(rd, abel_map(rd, sys, div));
  double r = 0.0;
  for (int k = 0; k < g; ++k) r = std::max(r, dist_mod1(lhs(k) - t(k)));
  return r;
}

}  // namespace fgl
