#include "fgl/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "fgl/dynamics.hpp"
#include "fgl/errors.hpp"
#include "fgl/greens.hpp"

namespace fgl {

namespace {

const std::vector<double> kEStar{-1.0, -0.5, 0.5, 1.0};
// Irrational test system: omega(inf) ~ 0.4496.
const std::vector<double> kEDagger{-1.0, -0.4, 0.1, 1.0};
const std::vector<double> kEDDagger{-1.0, -0.6, -0.2, 0.2, 0.6, 1.0};
const std::vector<double> kAsym3{-1.0, -0.7, -0.4, 0.1, 0.5, 1.0};

struct Setup {
  IntervalSystem sys;
  EquilibriumData eq;
  BranchSeries bs;
  explicit Setup(const std::vector<double>& ends)
      : sys(build_system(ends)), eq(equilibrium(sys, 64)), bs(branch_series(sys, 32)) {}
};

class Recorder {
 public:
  explicit Recorder(CriterionResult& r) : r_(r) {}
  void le(const std::string& name, double value, double tol) {
    r_.checks.push_back({name, value, tol, std::isfinite(value) && value <= tol});
  }
  // Boolean condition as a count of violations against tolerance 0.
  void holds(const std::string& name, bool ok) { r_.checks.push_back({name, ok ? 0.0 : 1.0, 0.0, ok}); }

 private:
  CriterionResult& r_;
};

GapDivisor random_divisor(const IntervalSystem& sys, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GapDivisor d;
  for (int j = 0; j < sys.gaps(); ++j)
    d.push_back({sys.gap_lo(j) + (0.001 + 0.998 * u(rng)) * (sys.gap_hi(j) - sys.gap_lo(j)),
                 u(rng) < 0.5 ? -1 : 1});
  return d;
}

// Max over a track of rotation residuals at levels >= from; also early and late block maxima.
struct TrackStats {
  double worst = 0.0;
  double early = 0.0;
  double late = 0.0;
};

TrackStats measured_rotation(const Setup& s, const MeasureSpec& spec, int nodes, int N, int n0, int from) {
  const OrthoModel m = build_model(discretize(spec, nodes), N);
  const int n1 = N - 3;
  const ThetaTrack tr = theta_sequence(s.eq, s.sys, measured_divisors(m, s.sys, s.bs, n0, n1), n0);
  const auto res = rotation_residuals(tr, s.eq.omega_inf);
  TrackStats st;
  const int mid = (from + n1) / 2;
  for (size_t i = 0; i < res.size(); ++i) {
    const int n = n0 + static_cast<int>(i);
    if (n < from) continue;
    st.worst = std::max(st.worst, res[i]);
    if (n < mid) st.early = std::max(st.early, res[i]);
    else st.late = std::max(st.late, res[i]);
  }
  return st;
}

void c1_potential(Recorder& rec, const AcceptanceOptions&) {
  Setup s(kEStar);
  rec.le("c1", std::abs(s.bs.c[1]), 1e-10);
  rec.le("omega_inf_0", std::abs(s.eq.omega_inf[0] - 0.5), 1e-9);
  rec.le("omega_inf_1", std::abs(s.eq.omega_inf[1] - 0.5), 1e-9);
  // E* is the preimage of [-1,1] under T(x) = (x^2 - 5/8)/(3/8).
  const double lead = 1.0 / 0.375;
  const double cap_oracle = std::sqrt(0.5 / lead);
  rec.le("capacity", std::abs(s.eq.capacity - cap_oracle), 1e-8);
  const double u = -0.625 / 0.375;
  const double g_oracle = 0.5 * std::log(std::abs(u) + std::sqrt(u * u - 1.0));
  rec.le("green_at_0", std::abs(green_log_phi(s.eq, s.sys, 0.0) - g_oracle), 1e-8);
}

void c2_wronskian(Recorder& rec, const AcceptanceOptions&) {
  Setup s(kEStar);
  const MeasureSpec eqs = make_equilibrium_spec(s.sys, s.eq);
  const std::vector<std::pair<std::string, MeasureSpec>> specs{
      {"equilibrium", eqs},
      {"poly_1+x^2", make_poly_spec(s.sys, s.eq, Poly({1.0, 0.0, 1.0}))},
      {"isospectral_(0.1,+1)", make_isospectral(s.sys, s.eq, {{0.1, 1}})},
      {"point_mass_0.25", with_point_mass(eqs, 0.25, 0.2)}};
  for (const auto& [name, spec] : specs) {
    const OrthoModel m = build_model(discretize(spec, 1024), 400);
    double worst = 0.0;
    for (int p = 0; p < 20; ++p) {
      const double z = s.sys.gap_lo(0) + (p + 0.5) / 20.0 * (s.sys.gap_hi(0) - s.sys.gap_lo(0));
      for (int n = 0; n <= 100; ++n) worst = std::max(worst, std::abs(wronskian(m, z, n) + 1.0));
    }
    rec.le("wronskian_" + name, worst, 1e-8);
  }
}

void c3_abel(Recorder& rec, const AcceptanceOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  for (const auto& [name, ends] : {std::pair{"E*", kEStar}, std::pair{"E3sym", kEDDagger}}) {
    Setup s(ends);
    const RiemannData rd = riemann_data(s.sys);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t)
      worst = std::max(worst, check_abel_consistency(rd, s.eq, s.sys, random_divisor(s.sys, rng)));
    rec.le(std::string("abel_harmonic_") + name, worst, 1e-7);
  }
}

void c4_pell(Recorder& rec, const AcceptanceOptions& opt) {
  std::mt19937_64 rng(opt.seed + 4);
  Setup star(kEStar);
  const PellPair p = divisor_to_pair(star.sys, star.bs, {{0.0, 1}});
  rec.le("L_worked_value", std::abs(p.L - 2.25), 1e-12);
  for (const auto& ends : {kEStar, kEDagger, kEDDagger, kAsym3}) {
    Setup s(ends);
    double ident = 0.0, prod = 0.0;
    for (int t = 0; t < 50; ++t) {
      const PellPair pp = divisor_to_pair(s.sys, s.bs, random_divisor(s.sys, rng));
      const PellReport r = pell_certificate(s.sys, s.eq, pp.G, pp.F, pp.G_next, pp.L, pp.L / 4.0);
      ident = std::max({ident, r.pell, pp.remainder});
      prod = std::max(prod, std::isnan(r.green) ? 1.0 : r.green);
    }
    rec.le("pell_identity_l" + std::to_string(s.sys.l), ident, 1e-10);
    rec.le("pell_green_product_l" + std::to_string(s.sys.l), prod, 1e-7);
  }
}

void c5_rotation(Recorder& rec, const AcceptanceOptions& opt) {
  std::mt19937_64 rng(opt.seed + 5);
  for (const auto& ends : {kEDagger, kAsym3}) {
    Setup s(ends);
    const RiemannData rd = riemann_data(s.sys);
    const Orbit o = torus_orbit(s.sys, s.eq, rd, s.bs, random_divisor(s.sys, rng), 300);
    double worst = 0.0;
    for (double r : rotation_residuals(o.track, s.eq.omega_inf)) worst = std::max(worst, r);
    rec.le("exact_orbit_l" + std::to_string(s.sys.l), worst, 1e-7);
  }
  Setup s(kEStar);
  const TrackStats eq = measured_rotation(s, make_equilibrium_spec(s.sys, s.eq), 2048, 120, 20, 50);
  rec.le("measured_equilibrium_n>=50", eq.worst, 5e-3);
  // Decreasing trend: later block maximum not above the earlier one, or at round-off level.
  rec.holds("measured_equilibrium_trend", eq.late <= eq.early || eq.late <= 1e-10);
  const TrackStats pq = measured_rotation(s, make_poly_spec(s.sys, s.eq, Poly({1.0, 0.0, 1.0})), 2048, 120, 20, 80);
  rec.le("measured_1+x^2_n>=80", pq.worst, 5e-3);
}

void c6_two_interval(Recorder& rec, const AcceptanceOptions&) {
  Setup s(kEStar);
  const RecurrenceTable rt = recurrence(discretize(make_equilibrium_spec(s.sys, s.eq), 2048), 120);
  const TwoIntervalLimits plus = two_interval_limits(s.sys, s.bs, 0.0, 1);
  const TwoIntervalLimits minus = two_interval_limits(s.sys, s.bs, 0.0, -1);
  rec.le("closed_form_(0,+1)", std::max(std::abs(plus.alpha), std::abs(plus.lambda - 9.0 / 16)), 1e-10);
  rec.le("closed_form_(0,-1)", std::max(std::abs(minus.alpha), std::abs(minus.lambda - 1.0 / 16)), 1e-10);
  // Even and odd subsequences of (alpha_{n+1}, lambda_{n+2}) against the two limits.
  double worst = 0.0;
  bool distinct = true;
  for (int n : {100, 110}) {
    const double le = rt.l(n + 2), lo = rt.l(n + 3);
    const double de = std::min(std::abs(le - plus.lambda), std::abs(le - minus.lambda));
    const double dd = std::min(std::abs(lo - plus.lambda), std::abs(lo - minus.lambda));
    worst = std::max({worst, de, dd, std::abs(rt.a(n + 1)), std::abs(rt.a(n + 2))});
    distinct = distinct && std::abs(le - lo) > 0.25;
  }
  rec.le("measured_subsequence_limits", worst, 1e-3);
  rec.holds("even_odd_limits_distinct", distinct);
  double agree = 0.0;
  for (int d : {-1, 1}) {
    const TwoIntervalLimits lim = two_interval_limits(s.sys, s.bs, 0.0, d);
    const auto t = tau(s.sys, s.bs, {{0.0, d}});
    agree = std::max({agree, std::abs(t[0] - lim.alpha), std::abs(t[1] - lim.lambda)});
    const GapDivisor back = tau_inverse(s.sys, s.bs, {lim.alpha, lim.lambda});
    agree = std::max(agree, std::abs(back[0].y));
    if (back[0].delta != d) agree = 1.0;
  }
  rec.le("closed_form_vs_tau_inverse", agree, 1e-10);
}

void c7_imap(Recorder& rec, const AcceptanceOptions& opt) {
  std::mt19937_64 rng(opt.seed + 7);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.05, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int m = 1 + t % 5;
    std::vector<double> x(m), y(m);
    for (auto& v : x) v = ux(rng);
    for (auto& v : y) v = uy(rng);
    const auto tup = imap(make_window(x, y));
    const Window back = imap_inverse(tup);
    const auto tup2 = imap(back);
    for (size_t i = 0; i < tup.size(); ++i) worst = std::max(worst, std::abs(tup2[i] - tup[i]));
    for (int i = 0; i < m; ++i) worst = std::max({worst, std::abs(back.x[i] - x[i]), std::abs(back.y[i] - y[i])});
  }
  rec.le("imap_roundtrip", worst, 1e-10);
  double quad = 0.0;
  for (const auto& ends : {kEStar, kEDagger}) {
    Setup s(ends);
    const OrthoModel m = build_model(discretize(make_poly_spec(s.sys, s.eq, Poly({1.0, 0.0, 1.0})), 1024), 120);
    for (int n : {10, 40, 90})
      for (int mm = 1; mm <= 5; ++mm) {
        const auto tup = imap(window_from_table(m.rt, n, mm));
        const MomentWindow mw = moment_window(m, n, mm);
        for (int j = 1; j <= mm; ++j)
          quad = std::max({quad, std::abs(tup[2 * (j - 1)] - mw.mu[j]), std::abs(tup[2 * (j - 1) + 1] - mw.nu[j])});
      }
  }
  rec.le("imap_vs_quadrature", quad, 1e-8);
}

void c8_tau(Recorder& rec, const AcceptanceOptions&) {
  for (const auto& [name, ends] : {std::pair{"E*", kEStar}, std::pair{"E3sym", kEDDagger}}) {
    Setup s(ends);
    const int g = s.sys.gaps();
    double worst = 0.0;
    int sign_errors = 0;
    // Full product grid of 20 points per gap with both signs in each gap (3-band: 20 x 20 x 4).
    std::vector<int> idx(g, 0);
    std::function<void(int, GapDivisor&)> rec_grid = [&](int j, GapDivisor& div) {
      if (j == g) {
        const auto m = tau(s.sys, s.bs, div);
        const GapDivisor back = tau_inverse(s.sys, s.bs, m);
        const auto m2 = tau(s.sys, s.bs, back);
        for (size_t k = 0; k < m.size(); ++k) worst = std::max(worst, std::abs(m[k] - m2[k]));
        for (int i = 0; i < g; ++i) {
          worst = std::max(worst, std::abs(back[i].y - div[i].y));
          sign_errors += back[i].delta != div[i].delta;
        }
        return;
      }
      for (int i = 0; i < 20; ++i)
        for (int d : {-1, 1}) {
          div[j] = {s.sys.gap_lo(j) + (i + 0.5) / 20.0 * (s.sys.gap_hi(j) - s.sys.gap_lo(j)), d};
          rec_grid(j + 1, div);
        }
    };
    GapDivisor div(g);
    rec_grid(0, div);
    rec.le(std::string("tau_roundtrip_") + name, worst, 1e-8);
    rec.holds(std::string("tau_roundtrip_signs_") + name, sign_errors == 0);
  }
}

void c9_r31(Recorder& rec, const AcceptanceOptions&) {
  Setup s(kEStar);
  for (int d : {1, -1}) {
    const OrthoModel m = build_model(discretize(make_isospectral(s.sys, s.eq, {{0.0, d}}), 1024), 110);
    double worst = 0.0;
    for (int n = 5; n <= 100; ++n) {
      const R31Residuals r = corR31_residuals(s.bs, moment_window(m, n, 3), 2);
      worst = std::max({worst, std::abs(r.moment[0]), std::abs(r.moment[1]), std::abs(r.cross[0]), std::abs(r.cross[1])});
    }
    rec.le(std::string("isospectral_(0,") + (d > 0 ? "+1)" : "-1)"), worst, 1e-8);
  }
  // Szego weight with a near-zero at 0.75: slow enough convergence to show the trend.
  const OrthoModel m = build_model(discretize(make_poly_spec(s.sys, s.eq, Poly({0.5625 + 4e-4, -1.5, 1.0})), 2048), 210);
  auto level = [&](int n) {
    double w = 0.0;
    for (int k : {n, n + 1}) {
      const R31Residuals r = corR31_residuals(s.bs, moment_window(m, k, 3), 2);
      for (double v : r.moment) w = std::max(w, std::abs(v));
      for (double v : r.cross) w = std::max(w, std::abs(v));
    }
    return w;
  };
  const double r50 = level(50), r100 = level(100), r200 = level(200);
  rec.le("szego_n=200", r200, 1e-2);
  rec.holds("szego_decreasing_50_100_200", r100 < r50 && r200 < r100);
}

void c10_zeros(Recorder& rec, const AcceptanceOptions&) {
  Setup s(kEStar);
  for (int d : {-1, 1}) {
    const MeasureSpec spec = make_isospectral(s.sys, s.eq, {{0.0, d}});
    const OrthoModel m = build_model(discretize(spec, 1024), 120);
    const auto divs = measured_divisors(m, s.sys, s.bs, 50, 80);
    std::vector<double> atoms(m.dm.nodes.begin() + m.dm.ac_nodes, m.dm.nodes.end());
    double pos_err = 0.0, min_sep = std::numeric_limits<double>::infinity();
    int wrong_family = 0, missing = 0;
    for (int n = 50; n <= 80; ++n) {
      const DivisorPoint pt = divs[n - 50][0];
      const GapZeros z = gap_zeros(m, s.sys, n);
      for (double a : z.p[0])
        for (double b : z.q[0]) min_sep = std::min(min_sep, std::abs(a - b));
      // The statement needs y outside supp(mu); a divisor point on an atom is excluded.
      bool on_atom = false;
      for (double x : atoms) on_atom = on_atom || std::abs(x - pt.y) <= 1e-9;
      if (on_atom) continue;
      // delta = -1 predicts a zero of P_n near y, delta = +1 a zero of Q_n.
      const auto& predicted = pt.delta < 0 ? z.p[0] : z.q[0];
      const auto& other = pt.delta < 0 ? z.q[0] : z.p[0];
      double best = std::numeric_limits<double>::infinity();
      for (double v : predicted) best = std::min(best, std::abs(v - pt.y));
      for (double v : other)
        if (std::abs(v - pt.y) <= 1e-3) ++wrong_family;
      if (best <= 1e-3) pos_err = std::max(pos_err, best);
      else ++missing;
    }
    const std::string tag = d > 0 ? "(0,+1)" : "(0,-1)";
    rec.le("position_error_" + tag, pos_err, 1e-3);
    rec.holds("family_off_atoms_" + tag, wrong_family == 0 && missing == 0);
    rec.holds("P_Q_separation_" + tag, !(min_sep < 1e-6));
  }
}

void c11_psi(Recorder& rec, const AcceptanceOptions&) {
  Setup s(kEStar);
  const RiemannData rd = riemann_data(s.sys);
  double inv = 0.0;
  for (int i = 1; i < 20; ++i)
    for (int d : {-1, 1}) {
      const double y = s.sys.gap_lo(0) + i / 20.0 * (s.sys.gap_hi(0) - s.sys.gap_lo(0));
      const TwoIntervalLimits lim = two_interval_limits(s.sys, s.bs, y, d);
      const Window w0 = make_window({lim.alpha}, {lim.lambda});
      const Window w2 = psi(s.sys, s.eq, rd, s.bs, psi(s.sys, s.eq, rd, s.bs, w0));
      inv = std::max({inv, std::abs(w2.x[0] - w0.x[0]), std::abs(w2.y[0] - w0.y[0])});
    }
  rec.le("psi_squared_identity", inv, 1e-8);
  const RecurrenceTable rt = recurrence(discretize(make_equilibrium_spec(s.sys, s.eq), 2048), 120);
  double shift = 0.0;
  for (int n = 50; n <= 110; ++n) {
    const Window next = psi(s.sys, s.eq, rd, s.bs, window_from_table(rt, n, 1));
    const Window meas = window_from_table(rt, n + 1, 1);
    shift = std::max({shift, std::abs(next.x[0] - meas.x[0]), std::abs(next.y[0] - meas.y[0])});
  }
  rec.le("psi_shift_measured_n>=50", shift, 1e-3);
}

void c12_equidistribution(Recorder& rec, const AcceptanceOptions&) {
  Setup s(kEDagger);
  const RiemannData rd = riemann_data(s.sys);
  const Orbit o = torus_orbit(s.sys, s.eq, rd, s.bs, {{-0.2, 1}}, 2000);
  std::vector<std::vector<double>> pts(o.track.theta.begin() + 1, o.track.theta.end());
  rec.le("star_discrepancy_K=2000", star_discrepancy(pts), 0.05);
  rec.holds("orbit_not_periodic", o.period == 0);
  long prev = 0;
  int violations = 0;
  for (int k = 0; k < 6; ++k) {
    const Subsequence sub = select_subsequence({s.eq.omega_inf[0]}, {0.3}, 0.05 / std::pow(2.0, k), 100000);
    if (sub.indices.size() < 2 || sub.max_gap <= prev) ++violations;
    prev = sub.max_gap;
  }
  rec.holds("max_gap_strictly_increasing", violations == 0);
}

struct Def {
  const char* name;
  double limit;
  void (*fn)(Recorder&, const AcceptanceOptions&);
};

const Def kDefs[] = {
    {"potential theory on E*", 5.0, c1_potential},
    {"Wronskian identity", 30.0, c2_wronskian},
    {"Abel/harmonic consistency", 30.0, c3_abel},
    {"Pell exactness", 5.0, c4_pell},
    {"rotation law", 120.0, c5_rotation},
    {"two-interval limits", 60.0, c6_two_interval},
    {"I-map roundtrips", 5.0, c7_imap},
    {"tau roundtrips", 30.0, c8_tau},
    {"moment residuals", 120.0, c9_r31},
    {"zero correspondence", 60.0, c10_zeros},
    {"psi oracle", 60.0, c11_psi},
    {"equidistribution and returns", 60.0, c12_equidistribution},
};

}  // namespace

int acceptance_count() { return static_cast<int>(std::size(kDefs)); }

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
  if (id < 1 || id > acceptance_count()) throw InputError("unknown acceptance criterion");
  const Def& def = kDefs[id - 1];
  CriterionResult r;
  r.id = id;
  r.name = def.name;
  r.time_limit = def.limit;
  Recorder rec(r);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    def.fn(rec, opt);
  } catch (const std::exception& e) {
    rec.holds(std::string("exception: ") + e.what(), false);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.le("runtime_seconds", r.seconds, r.time_limit);
  r.pass = true;
  for (const auto& c : r.checks) {
    r.pass = r.pass && c.pass;
    const double ratio = c.tolerance > 0.0 ? c.value / c.tolerance
                                           : (c.value <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    r.worst_ratio = std::max(r.worst_ratio, std::isnan(ratio) ? std::numeric_limits<double>::infinity() : ratio);
  }
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= acceptance_count(); ++id) out.push_back(run_criterion(id, opt));
  return out;
}

}  // namespace fgl
