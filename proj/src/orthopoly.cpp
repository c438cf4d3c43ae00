#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fgl/errors.hpp"
#include "fgl/kernels.hpp"
#include "fgl/measures.hpp"

namespace fgl {

namespace {

constexpr int kZeroSamples = 4096;
constexpr double kZeroTol = 1e-11;

// Stieltjes with full reorthogonalization on sqrt-weighted vectors.
void stieltjes(const DiscreteMeasure& dm, int N, RecurrenceTable& rt,
               std::vector<std::vector<double>>* basis) {
  const size_t M = dm.nodes.size();
  if (N < 1) throw InputError("recurrence: N must be positive");
  if (static_cast<size_t>(N) * 4 > M)
    throw InputError("recurrence: N too large for the node count (need N <= nodes/4)");
  const double* x = dm.nodes.data();
  std::vector<double> sw(M);
  for (size_t k = 0; k < M; ++k) sw[k] = std::sqrt(dm.weights[k]);

  rt.alpha.assign(N, 0.0);
  rt.lambda.assign(N, 0.0);
  rt.N = N;
  rt.lambda[0] = dm.total_mass;

  std::vector<std::vector<double>> v;
  v.reserve(N);
  v.emplace_back(M);
  const double norm0 = std::sqrt(kernels::dot(sw.data(), sw.data(), M));
  for (size_t k = 0; k < M; ++k) v[0][k] = sw[k] / norm0;

  std::vector<double> u(M);
  const std::vector<double> zero(M, 0.0);
  for (int n = 0; n < N; ++n) {
    const double a = kernels::dot3(x, v[n].data(), v[n].data(), M);
    rt.alpha[n] = a;
    if (n + 1 >= N) break;
    const double b = n == 0 ? 0.0 : std::sqrt(rt.lambda[n]);
    kernels::three_term(x, v[n].data(), n == 0 ? zero.data() : v[n - 1].data(), a, b, u.data(), M);
    for (int pass = 0; pass < 2; ++pass)
      for (int m = 0; m <= n; ++m) {
        const double c = kernels::dot(u.data(), v[m].data(), M);
        kernels::axpy(-c, v[m].data(), u.data(), M);
      }
    const double lam = kernels::dot(u.data(), u.data(), M);
    if (!(lam > 0.0) || !std::isfinite(lam))
      throw NumericError("recurrence: loss of positivity at n = " + std::to_string(n + 2));
    rt.lambda[n + 1] = lam;
    v.emplace_back(M);
    const double inv = 1.0 / std::sqrt(lam);
    for (size_t k = 0; k < M; ++k) v[n + 1][k] = u[k] * inv;
  }
  if (basis) *basis = std::move(v);
}

template <typename T>
T orthonormal_impl(const RecurrenceTable& rt, T z, int n) {
  if (n < 0 || n >= rt.N) throw InputError("eval_orthonormal: need 0 <= n < N");
  T prev = 0.0;
  T cur = 1.0 / std::sqrt(rt.lambda[0]);
  for (int k = 0; k < n; ++k) {
    const double bk = k == 0 ? 0.0 : std::sqrt(rt.lambda[k]);
    T next = ((z - rt.alpha[k]) * cur - bk * prev) / std::sqrt(rt.lambda[k + 1]);
    prev = cur;
    cur = next;
  }
  if (!std::isfinite(std::abs(cur))) throw NumericError("eval_orthonormal: overflow");
  return cur;
}

template <typename T>
T monic_impl(const RecurrenceTable& rt, T z, int n) {
  if (n < 0 || n > rt.N) throw InputError("eval_monic: need 0 <= n <= N");
  T prev = 0.0, cur = 1.0;
  for (int k = 1; k <= n; ++k) {
    T next = (z - rt.alpha[k - 1]) * cur - (k >= 2 ? rt.lambda[k - 1] : 0.0) * prev;
    prev = cur;
    cur = next;
  }
  if (!std::isfinite(std::abs(cur))) throw NumericError("eval_monic: overflow");
  return cur;
}

double min_node_distance(const DiscreteMeasure& dm, std::complex<double> z) {
  double d = 1e300;
  for (double x : dm.nodes) d = std::min(d, std::abs(z - x));
  return d;
}

template <typename T>
T direct_sum(const OrthoModel& m, T z, int n) {
  const auto& dm = m.dm;
  T s = 0.0;
  for (size_t k = 0; k < dm.nodes.size(); ++k) s += m.sqrt_w[k] * m.v[n][k] / (z - dm.nodes[k]);
  return s;
}

template <>
double direct_sum<double>(const OrthoModel& m, double z, int n) {
  return kernels::cauchy_sum(m.sqrt_w.data(), m.v[n].data(), m.dm.nodes.data(), z,
                             m.dm.nodes.size());
}

// Q_0..Q_n via the minimal-solution ratios started at row `top`.
template <typename T>
std::vector<T> backward_sequence(const RecurrenceTable& rt, T q0, T z, int n, int top) {
  // rho_i = Q_i / Q_{i-1}; sqrt(l_{i+1}) = rho_i ((z - a_{i+1}) - sqrt(l_{i+2}) rho_{i+1}).
  std::vector<T> rho(top + 1, T(0.0));
  for (int i = top - 1; i >= 1; --i) {
    const T den = (z - rt.alpha[i]) - std::sqrt(rt.lambda[i + 1]) * rho[i + 1];
    rho[i] = std::sqrt(rt.lambda[i]) / den;
  }
  std::vector<T> q(n + 1);
  q[0] = q0;
  for (int i = 1; i <= n; ++i) q[i] = q[i - 1] * rho[i];
  return q;
}

template <typename T>
T weyl_impl(const OrthoModel& m, T z, int n) {
  const int N = m.rt.N;
  if (n < 0 || n >= N) throw InputError("eval_weyl: need 0 <= n < N");
  const double scale = std::max(1.0, std::abs(m.dm.nodes.front()) + std::abs(m.dm.nodes.back()));
  if (min_node_distance(m.dm, z) <= 1e-12 * scale) throw DomainError("eval_weyl: z at a node");
  const T q0 = direct_sum<T>(m, z, 0);
  if (n == 0) return q0;
  // The backward recurrence is accurate where Q_n is tiny, the node sum where it is not.
  // Each carries an error estimate: the spread between two starting depths, and the
  // cancellation bound eps * sum |w P_n / (z - x)|.
  double back_err = std::numeric_limits<double>::infinity();
  T qa = T(0.0);
  if (n + 12 < N) {
    qa = backward_sequence<T>(m.rt, q0, z, n, N - 1)[n];
    const T qb = backward_sequence<T>(m.rt, q0, z, n, N - 11)[n];
    if (std::isfinite(std::abs(qa)) && std::isfinite(std::abs(qb))) back_err = std::abs(qa - qb);
    if (back_err <= 1e-14 * std::abs(qa)) return qa;
  }
  const T qd = direct_sum<T>(m, z, n);
  double mag = 0.0;
  for (size_t k = 0; k < m.dm.nodes.size(); ++k)
    mag += std::abs(m.sqrt_w[k] * m.v[n][k] / (z - m.dm.nodes[k]));
  const double direct_err = 4.0 * std::numeric_limits<double>::epsilon() * mag;
  return back_err < direct_err ? qa : qd;
}

}  // namespace

RecurrenceTable recurrence(const DiscreteMeasure& dm, int N) {
  RecurrenceTable rt;
  stieltjes(dm, N, rt, nullptr);
  return rt;
}

OrthoModel build_model(const DiscreteMeasure& dm, int N) {
  OrthoModel m;
  m.dm = dm;
  stieltjes(dm, N, m.rt, &m.v);
  m.sqrt_w.resize(dm.weights.size());
  for (size_t k = 0; k < dm.weights.size(); ++k) m.sqrt_w[k] = std::sqrt(dm.weights[k]);
  return m;
}

double eval_orthonormal(const RecurrenceTable& rt, double x, int n) {
  return orthonormal_impl<double>(rt, x, n);
}
std::complex<double> eval_orthonormal(const RecurrenceTable& rt, std::complex<double> z, int n) {
  return orthonormal_impl<std::complex<double>>(rt, z, n);
}
double eval_monic(const RecurrenceTable& rt, double x, int n) { return monic_impl<double>(rt, x, n); }
std::complex<double> eval_monic(const RecurrenceTable& rt, std::complex<double> z, int n) {
  return monic_impl<std::complex<double>>(rt, z, n);
}

double eval_weyl(const OrthoModel& m, double z, int n) { return weyl_impl<double>(m, z, n); }
std::complex<double> eval_weyl(const OrthoModel& m, std::complex<double> z, int n) {
  return weyl_impl<std::complex<double>>(m, z, n);
}

std::complex<double> eval_weyl_direct(const OrthoModel& m, std::complex<double> z, int n) {
  if (n < 0 || n >= m.rt.N) throw InputError("eval_weyl_direct: need 0 <= n < N");
  return direct_sum<std::complex<double>>(m, z, n);
}

namespace {

template <typename T>
T green_impl(const OrthoModel& m, T z, int n, int k) {
  switch (k) {
    case 0:
      return orthonormal_impl<T>(m.rt, z, n) * weyl_impl<T>(m, z, n);
    case 1:
      return orthonormal_impl<T>(m.rt, z, n) * weyl_impl<T>(m, z, n + 1);
    case -1:
      return orthonormal_impl<T>(m.rt, z, n + 1) * weyl_impl<T>(m, z, n);
    default:
      throw InputError("green: k must be 0, +1 or -1");
  }
}

template <typename T>
T wronskian_impl(const OrthoModel& m, T z, int n) {
  if (n + 2 > m.rt.N) throw InputError("wronskian: need n + 2 <= N");
  const T pn = orthonormal_impl<T>(m.rt, z, n), pn1 = orthonormal_impl<T>(m.rt, z, n + 1);
  const T qn = weyl_impl<T>(m, z, n), qn1 = weyl_impl<T>(m, z, n + 1);
  return std::sqrt(m.rt.lambda[n + 1]) * (pn * qn1 - qn * pn1);
}

}  // namespace

double green(const OrthoModel& m, double z, int n, int k) { return green_impl<double>(m, z, n, k); }
std::complex<double> green(const OrthoModel& m, std::complex<double> z, int n, int k) {
  return green_impl<std::complex<double>>(m, z, n, k);
}

double wronskian(const OrthoModel& m, double z, int n) { return wronskian_impl<double>(m, z, n); }
std::complex<double> wronskian(const OrthoModel& m, std::complex<double> z, int n) {
  return wronskian_impl<std::complex<double>>(m, z, n);
}

GapZeros gap_zeros(const OrthoModel& m, const IntervalSystem& sys, int n) {
  if (n < 0 || n + 1 >= m.rt.N) throw InputError("gap_zeros: need n + 1 < N");
  GapZeros out;
  out.p.resize(sys.gaps());
  out.q.resize(sys.gaps());
  for (int j = 0; j < sys.gaps(); ++j) {
    const double lo = sys.gap_lo(j), hi = sys.gap_hi(j);
    // Atoms inside the gap split it; Q_n has poles there.
    std::vector<double> cuts{lo};
    for (size_t k = m.dm.ac_nodes; k < m.dm.nodes.size(); ++k)
      if (m.dm.nodes[k] > lo && m.dm.nodes[k] < hi) cuts.push_back(m.dm.nodes[k]);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    for (size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double a = cuts[s], b = cuts[s + 1];
      const int count = std::max(16, static_cast<int>(kZeroSamples * (b - a) / (hi - lo)));
      auto scan = [&](auto f, std::vector<double>& zeros) {
        double xp = a + 0.5 * (b - a) / count;
        double fp = f(xp);
        for (int i = 1; i < count; ++i) {
          const double xc = a + (i + 0.5) * (b - a) / count;
          const double fc = f(xc);
          if (fp == 0.0) {
            zeros.push_back(xp);
          } else if ((fp < 0.0) != (fc < 0.0) && fc != 0.0) {
            double l = xp, r = xc, fl = fp;
            while (r - l > kZeroTol) {
              const double mid = 0.5 * (l + r);
              const double fm = f(mid);
              if (fm == 0.0) {
                l = r = mid;
                break;
              }
              if ((fm < 0.0) == (fl < 0.0)) {
                l = mid;
                fl = fm;
              } else {
                r = mid;
              }
            }
            zeros.push_back(0.5 * (l + r));
          }
          xp = xc;
          fp = fc;
        }
      };
      scan([&](double x) { return orthonormal_impl<double>(m.rt, x, n); }, out.p[j]);
      scan([&](double x) { return weyl_impl<double>(m, x, n); }, out.q[j]);
    }
    // P_n is a polynomial and continuous across an atom: catch a sign change the split scan misses.
    for (size_t s = 1; s + 1 < cuts.size(); ++s) {
      const double h = 1e-9 * (hi - lo);
      double l = cuts[s] - h, r = cuts[s] + h;
      double fl = orthonormal_impl<double>(m.rt, l, n);
      const double fr = orthonormal_impl<double>(m.rt, r, n);
      if (fl == 0.0 || fr == 0.0 || (fl < 0.0) == (fr < 0.0)) continue;
      while (r - l > kZeroTol * 1e-2) {
        const double mid = 0.5 * (l + r);
        const double fm = orthonormal_impl<double>(m.rt, mid, n);
        if (fm == 0.0) {
          l = r = mid;
          break;
        }
        if ((fm < 0.0) == (fl < 0.0)) {
          l = mid;
          fl = fm;
        } else {
          r = mid;
        }
      }
      out.p[j].push_back(0.5 * (l + r));
    }
    std::sort(out.p[j].begin(), out.p[j].end());
    for (double zp : out.p[j])
      for (double zq : out.q[j])
        if (std::abs(zp - zq) < 1e-9)
          throw ConsistencyError("gap_zeros: coincident P and Q zeros in gap " + std::to_string(j));
  }
  return out;
}

}  // namespace fgl
