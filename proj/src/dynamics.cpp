#include "fgl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "fgl/errors.hpp"

namespace fgl {

namespace {

double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

bool same_divisor(const GapDivisor& a, const GapDivisor& b, double tol) {
  for (size_t j = 0; j < a.size(); ++j)
    if (a[j].delta != b[j].delta || std::abs(a[j].y - b[j].y) > tol) return false;
  return true;
}

}  // namespace

std::vector<double> theta_of(const EquilibriumData& eq, const IntervalSystem& sys,
                             const GapDivisor& div) {
  validate_divisor(sys, div);
  const int g = sys.gaps();
  std::vector<double> t(g, 0.0);
  for (const auto& p : div) {
    const double s = p.delta == 0 ? 0.5 : 0.5 * p.delta;
    const auto w = harmonic_measure(eq, sys, p.y);
    for (int k = 0; k < g; ++k) t[k] += s * w[k];
  }
  for (auto& v : t) v = frac(v);
  return t;
}

ThetaTrack theta_sequence(const EquilibriumData& eq, const IntervalSystem& sys,
                          const std::vector<GapDivisor>& divisors, int n0) {
  ThetaTrack tr;
  tr.n0 = n0;
  for (const auto& d : divisors) tr.theta.push_back(theta_of(eq, sys, d));
  return tr;
}

std::vector<GapDivisor> measured_divisors(const OrthoModel& m, const IntervalSystem& sys,
                                          const BranchSeries& bs, int n0, int n1) {
  std::vector<GapDivisor> out;
  for (int n = n0; n <= n1; ++n) {
    const ExtractedPair ep = extract_pair(bs, moment_window(m, n, std::max(1, sys.l - 1)), sys.l);
    out.push_back(pair_to_divisor(sys, ep.G, ep.F, 0.5));
  }
  return out;
}

std::vector<double> rotation_residuals(const ThetaTrack& track, const std::vector<double>& omega_inf) {
  std::vector<double> r;
  for (size_t i = 0; i + 1 < track.theta.size(); ++i) {
    double worst = 0.0;
    for (size_t k = 0; k < track.theta[i].size(); ++k)
      worst = std::max(worst, dist_mod1(track.theta[i + 1][k] - track.theta[i][k] + omega_inf.at(k)));
    r.push_back(worst);
  }
  return r;
}

Subsequence select_subsequence(const std::vector<double>& omega, const std::vector<double>& gamma,
                               double eps, long n_max) {
  if (!(eps > 0.0)) throw InputError("select_subsequence: eps must be positive");
  if (omega.size() != gamma.size()) throw InputError("select_subsequence: dimension mismatch");
  Subsequence s;
  for (long n = 0; n <= n_max; ++n) {
    double worst = 0.0;
    for (size_t k = 0; k < omega.size() && worst < eps; ++k)
      worst = std::max(worst, dist_mod1(static_cast<double>(n) * omega[k] - gamma[k]));
    if (worst < eps) s.indices.push_back(n);
  }
  if (s.indices.size() > 1) {
    for (size_t i = 1; i < s.indices.size(); ++i)
      s.max_gap = std::max(s.max_gap, s.indices[i] - s.indices[i - 1]);
    s.mean_gap = static_cast<double>(s.indices.back() - s.indices.front()) / (s.indices.size() - 1);
  }
  return s;
}

WindowReport window_convergence(const RecurrenceTable& rt, const std::vector<long>& indices, int l,
                                int K) {
  if (l < 2) throw InputError("window_convergence: needs l >= 2");
  WindowReport rep;
  const size_t start = indices.size() > static_cast<size_t>(K) ? indices.size() - K : 0;
  std::vector<std::vector<double>> wins;
  for (size_t i = start; i < indices.size(); ++i) {
    const Window w = window_from_table(rt, static_cast<int>(indices[i]), l - 1);
    std::vector<double> v = w.x;
    v.insert(v.end(), w.y.begin(), w.y.end());
    wins.push_back(std::move(v));
  }
  for (size_t a = 0; a < wins.size(); ++a)
    for (size_t b = a + 1; b < wins.size(); ++b)
      for (size_t k = 0; k < wins[a].size(); ++k)
        rep.diameter = std::max(rep.diameter, std::abs(wins[a][k] - wins[b][k]));
  rep.used = static_cast<int>(wins.size());
  return rep;
}

Orbit torus_orbit(const IntervalSystem& sys, const EquilibriumData& eq, const RiemannData& rd,
                  const BranchSeries& bs, const GapDivisor& div0, int K) {
  if (K < 1) throw InputError("torus_orbit: K must be positive");
  Orbit o;
  o.divisors.push_back(div0);
  for (int i = 0; i < K; ++i) {
    const PellStep st = pell_step(sys, eq, rd, bs, o.divisors.back());
    o.divisors.push_back(st.next);
    o.L.push_back(st.L);
  }
  o.track = theta_sequence(eq, sys, o.divisors, 0);
  o.track.exact = true;
  const double tol = 1e-9 * sys.width();
  for (int p = 1; p <= K; ++p)
    if (same_divisor(o.divisors[K], o.divisors[K - p], tol)) {
      o.period = p;
      break;
    }
  return o;
}

double star_discrepancy(const std::vector<std::vector<double>>& pts) {
  const size_t N = pts.size();
  if (N == 0) return 0.0;
  const size_t d = pts[0].size();
  if (d == 1) {
    std::vector<double> x;
    for (const auto& p : pts) x.push_back(p[0]);
    std::sort(x.begin(), x.end());
    double D = 0.0;
    for (size_t i = 0; i < N; ++i)
      D = std::max({D, static_cast<double>(i + 1) / N - x[i], x[i] - static_cast<double>(i) / N});
    return D;
  }
  if (d != 2) throw InputError("star_discrepancy: only dimensions 1 and 2 are supported");
  // Critical boxes have corners on point coordinates (or 1); counts from a 2D prefix table.
  std::vector<double> xs, ys;
  for (const auto& p : pts) {
    xs.push_back(p[0]);
    ys.push_back(p[1]);
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  xs.push_back(1.0);
  ys.push_back(1.0);
  const size_t nx = xs.size(), ny = ys.size();
  std::vector<std::uint32_t> cnt((nx + 1) * (ny + 1), 0);
  auto at = [&](size_t i, size_t j) -> std::uint32_t& { return cnt[i * (ny + 1) + j]; };
  for (const auto& p : pts) {
    const size_t i = std::lower_bound(xs.begin(), xs.end(), p[0]) - xs.begin();
    const size_t j = std::lower_bound(ys.begin(), ys.end(), p[1]) - ys.begin();
    ++at(i + 1, j + 1);
  }
  for (size_t i = 1; i <= nx; ++i)
    for (size_t j = 1; j <= ny; ++j) at(i, j) += at(i - 1, j) + at(i, j - 1) - at(i - 1, j - 1);
  double D = 0.0;
  for (size_t i = 0; i < nx; ++i)
    for (size_t j = 0; j < ny; ++j) {
      const double vol = xs[i] * ys[j];
      const double closed = static_cast<double>(at(i + 1, j + 1)) / N;
      const double open = static_cast<double>(at(i, j)) / N;
      D = std::max({D, closed - vol, vol - open});
    }
  return D;
}

}  // namespace fgl
