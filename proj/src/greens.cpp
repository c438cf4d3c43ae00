#include "fgl/greens.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "fgl/errors.hpp"

namespace fgl {

namespace {

constexpr double kPi = std::numbers::pi;

double hull_norm(const IntervalSystem& sys) { return sup_norm_on(sys.H, sys.a.front(), sys.a.back()); }

// Roots of G in the gap closures with delta = round(sgn * F(y)/sqrt(H(y))). Near an end the
// branch vanishes; the point snaps to the end with delta = 0.
GapDivisor signed_divisor(const IntervalSystem& sys, const Poly& G, const Poly& F, int sgn,
                          double sign_tol) {
  const int g = sys.gaps();
  if (g == 0) return {};
  if (G.degree() != g) throw InputError("divisor polynomial must have degree l-1");
  const double scale = std::max(1.0, sys.radius());
  std::vector<double> ys;
  for (auto z : roots(G)) {
    if (std::abs(z.imag()) > 1e-6 * scale)
      throw ConsistencyError("divisor polynomial has a non-real root");
    ys.push_back(z.real());
  }
  std::sort(ys.begin(), ys.end());
  const double edge = 1e-8 * std::sqrt(hull_norm(sys));
  GapDivisor div(g);
  for (int j = 0; j < g; ++j) {
    const double lo = sys.gap_lo(j), hi = sys.gap_hi(j);
    double y = std::clamp(ys[j], lo, hi);
    const double s = (y == lo || y == hi) ? 0.0 : branch_values(sys, y).sqrtH;
    if (std::abs(s) <= edge) {
      div[j] = {(y - lo < hi - y) ? lo : hi, 0};
      continue;
    }
    const double ratio = sgn * F(y) / s;
    const double d = std::round(ratio);
    if ((d != 1.0 && d != -1.0) || std::abs(ratio - d) > sign_tol)
      throw ConsistencyError("sign ratio -F/sqrt(H) at a divisor point is not close to +-1");
    div[j] = {y, static_cast<int>(d)};
  }
  return div;
}

// (1/pi) int_E t^m dt/h from the c-series.
double series_moment(const BranchSeries& bs, int l, int m) {
  const int idx = m - l + 1;
  if (idx < 0) return 0.0;
  if (idx >= static_cast<int>(bs.c.size())) throw InputError("branch series too short");
  return bs.c[idx];
}

std::vector<double> tau_from(const std::vector<double>& G, const std::vector<double>& F, int l,
                             const std::function<double(int)>& moment) {
  std::vector<double> out(2 * (l - 1), 0.0);
  for (int j = 1; j < l; ++j) {
    double a = 0.0, b = 0.0;
    for (size_t i = 0; i < G.size(); ++i) a += G[i] * moment(static_cast<int>(i) + j);
    for (size_t i = 0; i < F.size(); ++i) b += F[i] * moment(static_cast<int>(i) + j);
    out[j - 1] = a;
    out[l - 1 + j - 1] = 0.5 * b;
  }
  return out;
}

}  // namespace

BranchSeries branch_series(const IntervalSystem& sys, int order) {
  if (order < 0 || order > 64) throw InputError("branch_series: order must be in [0, 64]");
  return {inverse_sqrt_series(sys, order), reciprocal_sqrt_series(sys, order)};
}

MomentWindow moment_window(const OrthoModel& m, int n, int max_pow) {
  if (max_pow < 1) throw InputError("moment_window: need m >= 1");
  if (n < 0 || n + 1 >= m.rt.N) throw InputError("moment_window: need n + 1 < N");
  MomentWindow mw;
  mw.n = n;
  mw.lambda_next = m.rt.lambda[n + 1];
  mw.mu.assign(max_pow + 1, 0.0);
  mw.nu.assign(max_pow + 1, 0.0);
  const double s = std::sqrt(mw.lambda_next);
  const auto& x = m.dm.nodes;
  for (size_t k = 0; k < x.size(); ++k) {
    double pm = m.v[n][k] * m.v[n][k], pc = s * m.v[n + 1][k] * m.v[n][k];
    for (int j = 0; j <= max_pow; ++j) {
      mw.mu[j] += pm;
      mw.nu[j] += pc;
      pm *= x[k];
      pc *= x[k];
    }
  }
  const double a = m.rt.alpha[n];
  if (std::abs(mw.mu[1] - a) > 1e-10 * (1.0 + std::abs(a)) ||
      std::abs(mw.nu[1] - mw.lambda_next) > 1e-10 * (1.0 + mw.lambda_next))
    throw ConsistencyError("moment_window: first moments disagree with the recurrence");
  return mw;
}

ExtractedPair extract_pair(const BranchSeries& bs, const MomentWindow& mw, int l) {
  if (l < 1) throw InputError("extract_pair: l must be positive");
  if (static_cast<int>(mw.mu.size()) < l || static_cast<int>(bs.h.size()) < l + 1)
    throw InputError("extract_pair: moment window or branch series too short");
  // Descending coefficients: g*_m = sum h_j mu_{m-j}, f*_m = h_m + 2 sum h_j nu_{m-1-j}.
  std::vector<double> gs(l), fs(l + 1);
  for (int m = 0; m < l; ++m) {
    double s = 0.0;
    for (int j = 0; j <= m; ++j) s += bs.h[j] * mw.mu[m - j];
    gs[m] = s;
  }
  for (int m = 0; m <= l; ++m) {
    double s = bs.h[m];
    for (int j = 0; j < m; ++j) s += 2.0 * bs.h[j] * mw.nu[m - 1 - j];
    fs[m] = s;
  }
  ExtractedPair out;
  out.drift = std::max(std::abs(gs[0] - 1.0), std::abs(fs[0] - 1.0));
  if (l >= 1 && bs.c.size() > 1) out.drift = std::max(out.drift, std::abs(fs[1] + bs.c[1]));
  if (!(out.drift <= 0.1)) throw NumericError("extract_pair: monic drift above 10%");
  std::vector<double> g(l), f(l + 1);
  for (int m = 0; m < l; ++m) g[l - 1 - m] = gs[m] / gs[0];
  for (int m = 0; m <= l; ++m) f[l - m] = fs[m] / fs[0];
  out.G = Poly(g);
  out.F = Poly(f);
  return out;
}

GapDivisor pair_to_divisor(const IntervalSystem& sys, const Poly& G, const Poly& F, double sign_tol) {
  return signed_divisor(sys, G, F, -1, sign_tol);
}

PellPair divisor_to_pair(const IntervalSystem& sys, const BranchSeries& bs, const GapDivisor& div) {
  validate_divisor(sys, div);
  if (bs.c.size() < 2) throw InputError("divisor_to_pair: branch series too short");
  const int l = sys.l;
  std::vector<double> ys;
  double ysum = 0.0;
  for (const auto& p : div) {
    ys.push_back(p.y);
    ysum += p.y;
  }
  PellPair out;
  out.G = Poly::from_roots(ys);
  Poly F = Poly({ysum - bs.c[1], 1.0}) * out.G;
  // Lagrange term: F(y_j) = -delta_j sqrt(H(y_j)).
  for (size_t j = 0; j < div.size(); ++j) {
    if (div[j].delta == 0) continue;
    std::vector<double> others;
    double dG = 1.0;
    for (size_t i = 0; i < div.size(); ++i)
      if (i != j) {
        others.push_back(ys[i]);
        dG *= ys[j] - ys[i];
      }
    const double s = branch_values(sys, ys[j]).sqrtH;
    F = F - Poly::from_roots(others).scaled(div[j].delta * s / dG);
  }
  out.F = F;
  // F^2 - H has degree <= 2l-2; the two top coefficients cancel analytically.
  const Poly P = F * F - sys.H;
  std::vector<double> pc(2 * l - 1);
  for (int i = 0; i <= 2 * l - 2; ++i) pc[i] = P.coeff(i);
  const DivMod dm = divmod(Poly(pc), out.G);
  out.L = dm.quotient.leading();
  if (!(out.L > 0.0)) throw ConsistencyError("divisor_to_pair: non-positive Pell constant");
  out.G_next = dm.quotient.scaled(1.0 / out.L);
  out.remainder = sup_norm_on(dm.remainder, sys.a.front(), sys.a.back()) / hull_norm(sys);
  return out;
}

std::vector<double> tau(const IntervalSystem& sys, const BranchSeries& bs, const GapDivisor& div,
                        int nodes) {
  const int l = sys.l;
  if (l < 2) throw DomainError("tau: needs at least two bands");
  if (static_cast<int>(bs.c.size()) < l + 1) throw InputError("tau: branch series too short");
  const PellPair pp = divisor_to_pair(sys, bs, div);
  const auto& G = pp.G.coeffs();
  const auto& F = pp.F.coeffs();
  const auto series = tau_from(G, F, l, [&](int m) { return series_moment(bs, l, m); });
  std::vector<double> mom(2 * l, 0.0);
  for (int k = 0; k < l; ++k) {
    const auto b = band_moments_over_h(sys, k, 2 * l - 1, nodes);
    for (int m = 0; m < 2 * l; ++m) mom[m] += b[m] / kPi;
  }
  const auto quad = tau_from(G, F, l, [&](int m) { return mom.at(m); });
  for (size_t i = 0; i < series.size(); ++i)
    if (std::abs(series[i] - quad[i]) > 1e-9)
      throw ConsistencyError("tau: series and quadrature routes disagree");
  return series;
}

GapDivisor tau_inverse(const IntervalSystem& sys, const BranchSeries& bs,
                       const std::vector<double>& moments, double range_tol) {
  const int l = sys.l;
  if (l < 2) throw DomainError("tau_inverse: needs at least two bands");
  const int g = l - 1;
  if (static_cast<int>(moments.size()) != 2 * g) throw InputError("tau_inverse: need 2(l-1) moments");
  auto cm = [&](int m) { return series_moment(bs, l, m); };
  // Row j, column i: coefficient of the unknown x^i coefficient; triangular after reversal.
  Eigen::MatrixXd M(g, g);
  Eigen::VectorXd ra(g), rb(g);
  const double c1 = bs.c.at(1);
  for (int j = 1; j <= g; ++j) {
    for (int i = 0; i < g; ++i) M(j - 1, i) = cm(i + j);
    ra(j - 1) = moments[j - 1] - cm(g + j);
    rb(j - 1) = 2.0 * moments[g + j - 1] - cm(l + j) + c1 * cm(g + j);
  }
  const auto lu = M.partialPivLu();
  const Eigen::VectorXd ga = lu.solve(ra), fb = lu.solve(rb);
  std::vector<double> gc(l, 1.0), fc(l + 1, 1.0);
  for (int i = 0; i < g; ++i) {
    gc[i] = ga(i);
    fc[i] = fb(i);
  }
  fc[g] = -c1;
  const Poly G(gc), F(fc);
  const double tol = 1e-9 * sys.width();
  for (auto z : roots(G)) {
    bool inside = std::abs(z.imag()) <= tol;
    if (inside) {
      inside = false;
      for (int j = 0; j < g; ++j)
        if (z.real() >= sys.gap_lo(j) - tol && z.real() <= sys.gap_hi(j) + tol) inside = true;
    }
    if (!inside) throw RangeError("tau_inverse: G has a root outside the gap closures");
  }
  GapDivisor div;
  try {
    div = pair_to_divisor(sys, G, F);
  } catch (const ConsistencyError&) {
    throw RangeError("tau_inverse: moments are not in the range of tau");
  }
  const auto back = tau(sys, bs, div);
  for (size_t i = 0; i < back.size(); ++i)
    if (std::abs(back[i] - moments[i]) > range_tol * (1.0 + std::abs(moments[i])))
      throw RangeError("tau_inverse: moments are not in the range of tau");
  return div;
}

PellReport pell_certificate(const IntervalSystem& sys, const EquilibriumData& eq, const Poly& G,
                            const Poly& F, const Poly& G_next, double L, double lambda_next) {
  PellReport r;
  const Poly P = F * F - sys.H - (G_next * G).scaled(L);
  r.pell = sup_norm_on(P, sys.a.front(), sys.a.back()) / hull_norm(sys);
  r.lambda = std::abs(L - 4.0 * lambda_next) / L;
  try {
    const GapDivisor d = signed_divisor(sys, G, F, -1, 0.5);
    const GapDivisor dn = signed_divisor(sys, G_next, F, +1, 0.5);
    double lg = std::log(4.0 * eq.capacity * eq.capacity);
    for (const auto& p : d)
      if (p.delta != 0) lg += p.delta * green_log_phi(eq, sys, p.y);
    for (const auto& p : dn)
      if (p.delta != 0) lg -= p.delta * green_log_phi(eq, sys, p.y);
    r.green = std::abs(L - std::exp(lg)) / L;
  } catch (const Error&) {
    r.green = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

PellStep pell_step(const IntervalSystem& sys, const EquilibriumData& eq, const RiemannData& rd,
                   const BranchSeries& bs, const GapDivisor& div) {
  if (sys.l < 2) throw DomainError("pell_step: needs at least two bands");
  const PellPair pp = divisor_to_pair(sys, bs, div);
  if (pp.remainder > 1e-10) throw ConsistencyError("pell_step: F^2 - H not divisible by G");
  PellStep st;
  st.L = pp.L;
  st.next = signed_divisor(sys, pp.G_next, pp.F, +1, 0.2);
  const Eigen::VectorXd t0 = torus_coords(rd, abel_map(rd, sys, div));
  const Eigen::VectorXd t1 = torus_coords(rd, abel_map(rd, sys, st.next));
  for (int k = 0; k < sys.gaps(); ++k)
    st.rotation_residual = std::max(st.rotation_residual, dist_mod1(t1(k) - t0(k) + eq.omega_inf[k]));
  if (st.rotation_residual > 1e-7)
    throw ConventionError("pell_step: rotation law violated by the step-side sign convention");
  return st;
}

PellStep pell_step(const IntervalSystem& sys, const EquilibriumData& eq, const GapDivisor& div) {
  const RiemannData rd = riemann_data(sys);
  return pell_step(sys, eq, rd, branch_series(sys, 2 * sys.l + 2), div);
}

R31Residuals corR31_residuals(const BranchSeries& bs, const MomentWindow& mw, int l) {
  const int M = static_cast<int>(mw.mu.size()) - 1;
  if (M < l + 1) throw InputError("corR31_residuals: need m >= l + 1");
  if (static_cast<int>(bs.h.size()) < M + 2) throw InputError("corR31_residuals: branch series too short");
  R31Residuals r;
  for (int mp = l; mp <= M; ++mp) {
    double s = 0.0;
    for (int j = 0; j <= mp; ++j) s += bs.h[j] * mw.mu[mp - j];
    r.moment.push_back(s);
  }
  for (int mp = l + 1; mp <= M + 1; ++mp) {
    double s = bs.h[mp];
    for (int j = 0; j < mp; ++j) s += 2.0 * bs.h[j] * mw.nu[mp - 1 - j];
    r.cross.push_back(s);
  }
  return r;
}

namespace {

// imap without the positivity check; entries outside the reach of level m never contribute.
std::vector<double> imap_raw(const Window& w) {
  const int m = w.m;
  const int xf = w.x_first(), yf = w.y_first();
  const int lo = std::min(xf - 1, yf - 2), hi = std::max(xf + m - 2, yf + m - 2);
  const int size = hi - lo + 1;
  std::vector<double> diag(size, 0.0), off(size, 0.0);  // off[r]: between rows r and r+1
  for (int i = 0; i < m; ++i) diag[xf + i - 1 - lo] = w.x[i];
  for (int i = 0; i < m; ++i) off[yf + i - 2 - lo] = std::sqrt(std::max(0.0, w.y[i]));
  const double s2 = off[0 - lo];
  std::vector<double> v(size, 0.0), nv(size);
  v[0 - lo] = 1.0;
  std::vector<double> out;
  for (int j = 1; j <= m; ++j) {
    for (int r = 0; r < size; ++r) {
      double s = diag[r] * v[r];
      if (r > 0) s += off[r - 1] * v[r - 1];
      if (r + 1 < size) s += off[r] * v[r + 1];
      nv[r] = s;
    }
    v.swap(nv);
    out.push_back(v[0 - lo]);
    out.push_back(s2 * v[1 - lo]);
  }
  return out;
}

}  // namespace

Window make_window(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || x.size() != y.size()) throw InputError("window needs m alphas and m lambdas");
  Window w;
  w.m = static_cast<int>(x.size());
  w.x = x;
  w.y = y;
  return w;
}

Window window_from_table(const RecurrenceTable& rt, int n, int m) {
  if (m < 1) throw InputError("window_from_table: m must be positive");
  Window w;
  w.m = m;
  const int xf = w.x_first(), yf = w.y_first();
  if (n + xf < 1 || n + yf < 2 || n + xf + m - 1 > rt.N || n + yf + m - 1 > rt.N)
    throw InputError("window_from_table: window exceeds the table");
  for (int i = 0; i < m; ++i) {
    w.x.push_back(rt.a(n + xf + i));
    w.y.push_back(rt.l(n + yf + i));
  }
  return w;
}

std::vector<double> imap(const Window& w) {
  if (w.m < 1 || static_cast<int>(w.x.size()) != w.m || static_cast<int>(w.y.size()) != w.m)
    throw InputError("imap: malformed window");
  for (double y : w.y)
    if (!(y > 0.0)) throw InputError("imap: lambda entries must be positive");
  return imap_raw(w);
}

Window imap_inverse(const std::vector<double>& tuple) {
  if (tuple.empty() || tuple.size() % 2 != 0) throw InputError("imap_inverse: need 2m entries");
  Window w;
  w.m = static_cast<int>(tuple.size() / 2);
  w.x.assign(w.m, 0.0);
  w.y.assign(w.m, 0.0);
  const int xf = w.x_first(), yf = w.y_first();
  // Each level j adds one unknown to each of its two equations, entering linearly.
  auto solve = [&](double& slot, int out_index, bool is_y) {
    slot = 0.0;
    const double r0 = imap_raw(w)[out_index];
    slot = 1.0;
    const double coef = imap_raw(w)[out_index] - r0;
    if (!(std::abs(coef) > 1e-300)) throw RangeError("imap_inverse: vanishing inner product");
    slot = (tuple[out_index] - r0) / coef;
    if (is_y && !(slot > 0.0)) throw RangeError("imap_inverse: recovered lambda is not positive");
  };
  for (int j = 1; j <= w.m; ++j) {
    if (j % 2 == 1) {
      solve(w.x[1 - (j - 1) / 2 - xf], 2 * (j - 1), false);
      solve(w.y[1 + (j + 1) / 2 - yf], 2 * (j - 1) + 1, true);
    } else {
      solve(w.y[2 - j / 2 - yf], 2 * (j - 1), true);
      solve(w.x[1 + j / 2 - xf], 2 * (j - 1) + 1, false);
    }
  }
  const auto back = imap_raw(w);
  for (size_t i = 0; i < tuple.size(); ++i)
    if (std::abs(back[i] - tuple[i]) > 1e-10 * (1.0 + std::abs(tuple[i])))
      throw RangeError("imap_inverse: reconstruction failed");
  return w;
}

Window psi(const IntervalSystem& sys, const EquilibriumData& eq, const RiemannData& rd,
           const BranchSeries& bs, const Window& w) {
  const int g = sys.gaps();
  if (g < 1 || w.m != g) throw InputError("psi: window size must be l-1");
  const auto t = imap(w);
  std::vector<double> mom(2 * g);
  for (int j = 0; j < g; ++j) {
    mom[j] = t[2 * j];
    mom[g + j] = t[2 * j + 1];
  }
  GapDivisor div;
  try {
    div = tau_inverse(sys, bs, mom, 1e-6);
  } catch (const RangeError&) {
    throw DomainError("psi: window is not a limit point");
  }
  if (divisor_to_pair(sys, bs, div).remainder > 1e-6) throw DomainError("psi: window is not a limit point");
  const PellStep st = pell_step(sys, eq, rd, bs, div);
  const auto nm = tau(sys, bs, st.next);
  std::vector<double> nt(2 * g);
  for (int j = 0; j < g; ++j) {
    nt[2 * j] = nm[j];
    nt[2 * j + 1] = nm[g + j];
  }
  return imap_inverse(nt);
}

TwoIntervalLimits two_interval_limits(const IntervalSystem& sys, const BranchSeries& bs, double y,
                                      int delta) {
  if (sys.l != 2) throw DomainError("two_interval_limits: needs exactly two bands");
  if (!(y > sys.gap_lo(0) && y < sys.gap_hi(0))) throw InputError("two_interval_limits: y must lie in the open gap");
  if (delta != 1 && delta != -1) throw InputError("two_interval_limits: delta must be +-1");
  if (bs.c.size() < 3) throw InputError("two_interval_limits: branch series too short");
  const double c1 = bs.c[1], c2 = bs.c[2];
  const double s = branch_values(sys, y).sqrtH;
  return {-y + c1, 0.5 * (y * (c1 - y) + c2 - c1 * c1 - delta * s)};
}

}  // namespace fgl
