#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "fgl/errors.hpp"
#include "fgl/greens.hpp"

using namespace fgl;
using cd = std::complex<double>;

namespace {

const std::vector<double> kEStar{-1.0, -0.5, 0.5, 1.0};
const std::vector<double> kEDagger{-1.0, -0.4, 0.1, 1.0};
const std::vector<double> kEDDagger{-1.0, -0.6, -0.2, 0.2, 0.6, 1.0};

struct Fixture {
  IntervalSystem sys;
  EquilibriumData eq;
  BranchSeries bs;
  explicit Fixture(const std::vector<double>& ends)
      : sys(build_system(ends)), eq(equilibrium(sys, 64)), bs(branch_series(sys, 24)) {}
};

// Binomial series of (1 - t)^{-1/2}.
std::vector<double> binom_inv_sqrt(int n) {
  std::vector<double> b(n + 1, 1.0);
  for (int k = 1; k <= n; ++k) b[k] = b[k - 1] * (k - 0.5) / k;
  return b;
}

double poly_dist(const Poly& a, const Poly& b) {
  double d = 0.0;
  for (int i = 0; i <= std::max(a.degree(), b.degree()); ++i) d = std::max(d, std::abs(a.coeff(i) - b.coeff(i)));
  return d;
}

}  // namespace

TEST_CASE("branch series against Taylor oracles") {
  Fixture f(kEStar);
  CHECK(f.bs.c[0] == 1.0);
  CHECK(f.bs.h[0] == 1.0);
  // 1/sqrt(H) = z^{-2} (1 - u)^{-1/2} (1 - u/4)^{-1/2}, u = z^{-2}.
  const auto b = binom_inv_sqrt(12);
  for (int k = 0; k <= 10; ++k) {
    double ck = 0.0;
    for (int i = 0; i <= k; ++i) ck += b[i] * b[k - i] * std::pow(0.25, k - i);
    CHECK(std::abs(f.bs.c[2 * k] - ck) < 1e-14);
    CHECK(std::abs(f.bs.c[2 * k + 1]) < 1e-15);
  }
  CHECK(f.bs.c[2] == doctest::Approx(0.625).epsilon(1e-15));
  Fixture one({-1.0, 1.0});
  const std::vector<double> sq{1.0, 0.0, -0.5, 0.0, -0.125, 0.0, -0.0625};
  for (size_t i = 0; i < sq.size(); ++i) CHECK(std::abs(one.bs.h[i] - sq[i]) < 1e-15);
  CHECK_THROWS_AS(branch_series(f.sys, 65), InputError);
  Fixture dd(kEDDagger);
  for (int i = 1; i < 24; i += 2) {
    CHECK(std::abs(dd.bs.c[i]) < 1e-15);
    CHECK(std::abs(dd.bs.h[i]) < 1e-15);
  }
}

TEST_CASE("moment window identities") {
  Fixture f(kEDagger);
  auto m = build_model(discretize(with_point_mass(make_poly_spec(f.sys, f.eq, Poly({1.0, 0.3, 1.0})), -0.2, 0.1), 512), 120);
  for (int n : {0, 1, 7, 40, 100}) {
    auto mw = moment_window(m, n, 4);
    CHECK(std::abs(mw.mu[0] - 1.0) < 1e-12);
    CHECK(std::abs(mw.nu[0]) < 1e-12);
    CHECK(std::abs(mw.mu[1] - m.rt.a(n + 1)) < 1e-10);
    CHECK(std::abs(mw.nu[1] - m.rt.l(n + 2)) < 1e-10);
    const double prev = n == 0 ? 0.0 : m.rt.l(n + 1);
    CHECK(std::abs(mw.mu[2] - (m.rt.l(n + 2) + m.rt.a(n + 1) * m.rt.a(n + 1) + prev)) < 1e-10);
  }
  CHECK_THROWS_AS(moment_window(m, 119, 2), InputError);
}

TEST_CASE("divisor_to_pair and pair_to_divisor on E*") {
  Fixture f(kEStar);
  auto p = divisor_to_pair(f.sys, f.bs, {{0.0, 1}});
  CHECK(poly_dist(p.G, Poly({0.0, 1.0})) < 1e-15);
  CHECK(poly_dist(p.F, Poly({0.5, 0.0, 1.0})) < 1e-14);
  CHECK(p.L == doctest::Approx(2.25).epsilon(1e-13));
  const double phi0 = std::exp(green_log_phi(f.eq, f.sys, 0.0));
  CHECK(std::abs(p.L - 4.0 * f.eq.capacity * f.eq.capacity * phi0 * phi0) < 1e-9);
  auto q = divisor_to_pair(f.sys, f.bs, {{0.0, -1}});
  CHECK(poly_dist(q.F, Poly({-0.5, 0.0, 1.0})) < 1e-14);
  CHECK(q.L == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(std::abs(q.L - 4.0 * f.eq.capacity * f.eq.capacity / (phi0 * phi0)) < 1e-9);
  auto e = divisor_to_pair(f.sys, f.bs, {{-0.5, 0}});
  CHECK(e.F(-0.5) == doctest::Approx(0.0));
  CHECK(std::abs(e.F(-0.5) * e.F(-0.5) - f.sys.H(-0.5)) < 1e-15);
  CHECK(e.remainder < 1e-14);

  auto d1 = pair_to_divisor(f.sys, Poly({0.0, 1.0}), Poly({0.5, 0.0, 1.0}));
  CHECK(d1[0].y == 0.0);
  CHECK(d1[0].delta == 1);
  CHECK(pair_to_divisor(f.sys, Poly({0.0, 1.0}), Poly({-0.5, 0.0, 1.0}))[0].delta == -1);
  auto d3 = pair_to_divisor(f.sys, Poly({0.5, 1.0}), Poly({-0.25, 0.0, 1.0}));
  CHECK(d3[0].y == -0.5);
  CHECK(d3[0].delta == 0);
  CHECK_THROWS_AS(pair_to_divisor(f.sys, Poly({0.0, 1.0}), Poly({3.0, 0.0, 1.0})), ConsistencyError);
}

TEST_CASE("Pell pair identity on random divisors") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& ends : {kEDagger, kEDDagger, std::vector<double>{-1.0, -0.7, -0.4, 0.1, 0.5, 1.0}}) {
    Fixture f(ends);
    for (int t = 0; t < 30; ++t) {
      GapDivisor div;
      for (int j = 0; j < f.sys.gaps(); ++j)
        div.push_back({f.sys.gap_lo(j) + (0.02 + 0.96 * u(rng)) * (f.sys.gap_hi(j) - f.sys.gap_lo(j)),
                       u(rng) < 0.5 ? -1 : 1});
      auto p = divisor_to_pair(f.sys, f.bs, div);
      CHECK(p.remainder < 1e-10);
      CHECK(std::abs(p.F.leading() - 1.0) < 1e-15);
      CHECK(std::abs(p.F.coeff(f.sys.l - 1) + f.bs.c[1]) < 1e-14);
      for (const auto& d : div) CHECK(std::abs(p.F(d.y) + d.delta * branch_values(f.sys, d.y).sqrtH) < 1e-13);
      auto back = pair_to_divisor(f.sys, p.G, p.F);
      for (int j = 0; j < f.sys.gaps(); ++j) {
        CHECK(std::abs(back[j].y - div[j].y) < 1e-12);
        CHECK(back[j].delta == div[j].delta);
      }
    }
  }
}

TEST_CASE("tau and tau_inverse") {
  Fixture f(kEStar);
  auto t1 = tau(f.sys, f.bs, {{0.0, 1}});
  CHECK(std::abs(t1[0]) < 1e-14);
  CHECK(std::abs(t1[1] - 9.0 / 16) < 1e-14);
  auto t2 = tau(f.sys, f.bs, {{0.0, -1}});
  CHECK(std::abs(t2[1] - 1.0 / 16) < 1e-14);
  CHECK_NOTHROW(tau(f.sys, f.bs, {{-0.5, 0}}));
  CHECK_NOTHROW(tau(f.sys, f.bs, {{0.5, 0}}));
  auto inv = tau_inverse(f.sys, f.bs, {0.0, 9.0 / 16});
  CHECK(std::abs(inv[0].y) < 1e-12);
  CHECK(inv[0].delta == 1);
  CHECK(tau_inverse(f.sys, f.bs, {0.0, 1.0 / 16})[0].delta == -1);
  CHECK_THROWS_AS(tau_inverse(f.sys, f.bs, {0.0, 10.0}), RangeError);
  CHECK_THROWS_AS(tau_inverse(f.sys, f.bs, {0.9, 0.3}), RangeError);

  for (const auto& ends : {kEStar, kEDagger, kEDDagger}) {
    Fixture s(ends);
    const int g = s.sys.gaps();
    for (int i = 0; i < 20; ++i)
      for (int d : {-1, 1}) {
        GapDivisor div;
        for (int j = 0; j < g; ++j) {
          const double fr = (i + 0.5) / 20.0;
          div.push_back({s.sys.gap_lo(j) + fr * (s.sys.gap_hi(j) - s.sys.gap_lo(j)), (j % 2 == 0) ? d : -d});
        }
        auto m = tau(s.sys, s.bs, div);
        auto back = tau_inverse(s.sys, s.bs, m);
        auto m2 = tau(s.sys, s.bs, back);
        for (size_t k = 0; k < m.size(); ++k) CHECK(std::abs(m[k] - m2[k]) < 1e-8);
        for (int j = 0; j < g; ++j) {
          CHECK(std::abs(back[j].y - div[j].y) < 1e-8);
          CHECK(back[j].delta == div[j].delta);
        }
      }
  }
}

TEST_CASE("extract_pair") {
  Fixture f(kEStar);
  MomentWindow exact;
  const auto t = tau(f.sys, f.bs, {{0.0, 1}});
  exact.mu = {1.0, t[0]};
  exact.nu = {0.0, t[1]};
  auto ep = extract_pair(f.bs, exact, 2);
  CHECK(poly_dist(ep.G, Poly({0.0, 1.0})) < 1e-10);
  CHECK(poly_dist(ep.F, Poly({0.5, 0.0, 1.0})) < 1e-10);

  Fixture one({-1.0, 1.0});
  auto cm = build_model(discretize(make_equilibrium_spec(one.sys, one.eq), 256), 60);
  auto ec = extract_pair(one.bs, moment_window(cm, 30, 2), 1);
  CHECK(ec.G.degree() == 0);
  CHECK(poly_dist(ec.G, Poly({1.0})) < 1e-8);
  CHECK(poly_dist(ec.F, Poly({0.0, 1.0})) < 1e-8);

  auto m = build_model(discretize(make_equilibrium_spec(f.sys, f.eq), 1024), 120);
  auto e80 = extract_pair(f.bs, moment_window(m, 80, 2), 2);
  CHECK(std::abs(roots(e80.G)[0].real()) < 2e-3);
}

TEST_CASE("Pell certificates") {
  Fixture f(kEStar);
  auto r = pell_certificate(f.sys, f.eq, Poly({0.0, 1.0}), Poly({0.5, 0.0, 1.0}), Poly({0.0, 1.0}), 2.25, 9.0 / 16);
  CHECK(r.pell < 1e-12);
  CHECK(r.lambda < 1e-14);
  CHECK(r.green < 1e-8);

  Fixture one({-1.0, 1.0});
  auto r1 = pell_certificate(one.sys, one.eq, Poly({1.0}), Poly({0.0, 1.0}), Poly({1.0}), 1.0, 0.25);
  CHECK(r1.pell == 0.0);
  CHECK(r1.lambda < 1e-15);
  CHECK(r1.green < 1e-8);

  auto m = build_model(discretize(make_equilibrium_spec(f.sys, f.eq), 1024), 120);
  auto a = extract_pair(f.bs, moment_window(m, 80, 2), 2);
  auto b = extract_pair(f.bs, moment_window(m, 81, 2), 2);
  const Poly P = a.F * a.F - f.sys.H;
  const double L = divmod(Poly({P.coeff(0), P.coeff(1), P.coeff(2)}), a.G).quotient.leading();
  auto est = pell_certificate(f.sys, f.eq, a.G, a.F, b.G, L, m.rt.l(82));
  CHECK(est.pell <= 5e-3);
  CHECK(est.lambda <= 5e-3);
}

TEST_CASE("pell_step rotation law and orbits") {
  Fixture f(kEStar);
  auto rd = riemann_data(f.sys);
  auto s1 = pell_step(f.sys, f.eq, rd, f.bs, {{0.0, 1}});
  CHECK(std::abs(s1.next[0].y) < 1e-12);
  CHECK(s1.next[0].delta == -1);
  CHECK(s1.L == doctest::Approx(2.25).epsilon(1e-13));
  auto s2 = pell_step(f.sys, f.eq, rd, f.bs, s1.next);
  CHECK(s2.next[0].delta == 1);
  CHECK(s2.L == doctest::Approx(0.25).epsilon(1e-13));
  // Product of L/4 over one period equals cap^{2 period}.
  CHECK(std::abs(s1.L * s2.L / 16.0 - std::pow(f.eq.capacity, 4)) < 1e-7);

  // t = 0 is the right gap end; one step lands on t = 1/2, the left end.
  auto e1 = pell_step(f.sys, f.eq, rd, f.bs, {{0.5, 0}});
  CHECK(e1.next[0].y == -0.5);
  CHECK(e1.next[0].delta == 0);
  CHECK(e1.L == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(pell_step(f.sys, f.eq, {{0.5, 0}}).next[0].y == -0.5);

  for (const auto& ends : {kEDagger, kEDDagger, std::vector<double>{-1.0, -0.7, -0.4, 0.1, 0.5, 1.0}}) {
    Fixture s(ends);
    auto rds = riemann_data(s.sys);
    GapDivisor div;
    for (int j = 0; j < s.sys.gaps(); ++j) div.push_back({0.5 * (s.sys.gap_lo(j) + s.sys.gap_hi(j)) + 0.01, 1});
    for (int it = 0; it < 40; ++it) {
      auto st = pell_step(s.sys, s.eq, rds, s.bs, div);
      CHECK(st.rotation_residual < 1e-7);
      CHECK(st.L > 0.0);
      auto pp = divisor_to_pair(s.sys, s.bs, div);
      auto cert = pell_certificate(s.sys, s.eq, pp.G, pp.F, pp.G_next, pp.L, pp.L / 4.0);
      CHECK(cert.pell < 1e-10);
      CHECK(cert.green < 1e-7);
      div = st.next;
    }
  }
}

TEST_CASE("corR31 residuals") {
  Fixture f(kEStar);
  auto iso = build_model(discretize(make_isospectral(f.sys, f.eq, {{0.0, 1}}), 1024), 60);
  for (int n = 5; n < 50; ++n) {
    auto r = corR31_residuals(f.bs, moment_window(iso, n, 4), 2);
    CHECK(std::abs(r.moment[0]) < 1e-8);
    CHECK(std::abs(r.moment[1]) < 1e-8);
    CHECK(std::abs(r.cross[0]) < 1e-8);
    CHECK(std::abs(r.cross[1]) < 1e-8);
  }
  Fixture one({-1.0, 1.0});
  auto cm = build_model(discretize(make_equilibrium_spec(one.sys, one.eq), 256), 40);
  auto rc = corR31_residuals(one.bs, moment_window(cm, 10, 2), 1);
  CHECK(std::abs(rc.moment[0]) < 1e-12);

  auto m = build_model(discretize(make_equilibrium_spec(f.sys, f.eq), 2048), 260);
  double prev = 1e9;
  for (int n : {50, 100, 200}) {
    auto r = corR31_residuals(f.bs, moment_window(m, n, 3), 2);
    double worst = 0.0;
    for (double v : r.moment) worst = std::max(worst, std::abs(v));
    for (double v : r.cross) worst = std::max(worst, std::abs(v));
    CHECK(worst <= 1e-2);
    CHECK(worst <= prev * 1.0000001 + 1e-13);
    prev = worst;
  }
}

TEST_CASE("imap and imap_inverse") {
  auto w1 = make_window({0.3}, {0.7});
  auto t1 = imap(w1);
  CHECK(t1[0] == 0.3);
  CHECK(t1[1] == doctest::Approx(0.7));
  // m = 2: x = (x_1, x_2), y = (y_1, y_2).
  auto w2 = make_window({0.3, -0.2}, {0.4, 0.7});
  auto t2 = imap(w2);
  CHECK(t2[2] == doctest::Approx(0.7 + 0.09 + 0.4));
  CHECK(t2[3] == doctest::Approx(0.7 * (0.3 - 0.2)));

  std::mt19937_64 rng(20241);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.05, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int m = 1 + t % 5;
    std::vector<double> x(m), y(m);
    for (auto& v : x) v = ux(rng);
    for (auto& v : y) v = uy(rng);
    auto w = make_window(x, y);
    auto tup = imap(w);
    auto back = imap_inverse(tup);
    for (int i = 0; i < m; ++i) worst = std::max({worst, std::abs(back.x[i] - x[i]), std::abs(back.y[i] - y[i])});
    auto tup2 = imap(back);
    for (size_t i = 0; i < tup.size(); ++i) CHECK(std::abs(tup2[i] - tup[i]) < 1e-10);
  }
  CHECK(worst < 1e-8);
  CHECK_THROWS_AS(imap_inverse({0.1, -0.3}), RangeError);
  CHECK_THROWS_AS(imap(make_window({0.1}, {0.0})), InputError);

  Fixture f(kEStar);
  auto m = build_model(discretize(make_equilibrium_spec(f.sys, f.eq), 1024), 120);
  for (int mm = 1; mm <= 5; ++mm) {
    auto tup = imap(window_from_table(m.rt, 40, mm));
    auto mw = moment_window(m, 40, mm);
    for (int j = 1; j <= mm; ++j) {
      CHECK(std::abs(tup[2 * (j - 1)] - mw.mu[j]) < 1e-8);
      CHECK(std::abs(tup[2 * (j - 1) + 1] - mw.nu[j]) < 1e-8);
    }
  }
}

TEST_CASE("psi") {
  Fixture f(kEStar);
  auto rd = riemann_data(f.sys);
  auto w = psi(f.sys, f.eq, rd, f.bs, make_window({0.0}, {9.0 / 16}));
  CHECK(std::abs(w.x[0]) < 1e-10);
  CHECK(std::abs(w.y[0] - 1.0 / 16) < 1e-10);
  for (double y : {-0.3, 0.1, 0.42})
    for (int d : {-1, 1}) {
      auto lim = two_interval_limits(f.sys, f.bs, y, d);
      auto w0 = make_window({lim.alpha}, {lim.lambda});
      auto w2 = psi(f.sys, f.eq, rd, f.bs, psi(f.sys, f.eq, rd, f.bs, w0));
      CHECK(std::abs(w2.x[0] - w0.x[0]) < 1e-8);
      CHECK(std::abs(w2.y[0] - w0.y[0]) < 1e-8);
    }
  auto m = build_model(discretize(make_equilibrium_spec(f.sys, f.eq), 1024), 120);
  for (int n = 50; n < 100; n += 7) {
    auto next = psi(f.sys, f.eq, rd, f.bs, window_from_table(m.rt, n, 1));
    auto meas = window_from_table(m.rt, n + 1, 1);
    CHECK(std::abs(next.x[0] - meas.x[0]) <= 1e-3);
    CHECK(std::abs(next.y[0] - meas.y[0]) <= 1e-3);
  }
  CHECK_THROWS_AS(psi(f.sys, f.eq, rd, f.bs, make_window({0.0}, {10.0})), DomainError);

  Fixture dd(kEDDagger);
  auto rdd = riemann_data(dd.sys);
  GapDivisor div{{-0.45, 1}, {0.3, -1}};
  auto mom = tau(dd.sys, dd.bs, div);
  auto win = imap_inverse({mom[0], mom[2], mom[1], mom[3]});
  auto shifted = psi(dd.sys, dd.eq, rdd, dd.bs, win);
  auto nm = tau(dd.sys, dd.bs, pell_step(dd.sys, dd.eq, rdd, dd.bs, div).next);
  auto expect = imap_inverse({nm[0], nm[2], nm[1], nm[3]});
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(shifted.x[i] - expect.x[i]) < 1e-8);
    CHECK(std::abs(shifted.y[i] - expect.y[i]) < 1e-8);
  }
}

TEST_CASE("two-interval closed forms") {
  Fixture f(kEStar);
  auto p = two_interval_limits(f.sys, f.bs, 0.0, 1);
  CHECK(std::abs(p.alpha) < 1e-15);
  CHECK(std::abs(p.lambda - 9.0 / 16) < 1e-14);
  auto q = two_interval_limits(f.sys, f.bs, 0.0, -1);
  CHECK(std::abs(q.lambda - 1.0 / 16) < 1e-14);
  CHECK_THROWS_AS(two_interval_limits(f.sys, f.bs, 0.7, 1), InputError);
  Fixture dd(kEDDagger);
  CHECK_THROWS_AS(two_interval_limits(dd.sys, dd.bs, 0.0, 1), DomainError);
  for (const auto& ends : {kEStar, kEDagger}) {
    Fixture s(ends);
    for (int i = 1; i < 40; ++i) {
      const double y = s.sys.gap_lo(0) + i / 40.0 * (s.sys.gap_hi(0) - s.sys.gap_lo(0));
      for (int d : {-1, 1}) {
        auto lim = two_interval_limits(s.sys, s.bs, y, d);
        auto t = tau(s.sys, s.bs, {{y, d}});
        CHECK(std::abs(lim.alpha - t[0]) < 1e-10);
        CHECK(std::abs(lim.lambda - t[1]) < 1e-10);
      }
    }
  }
}

TEST_CASE("isospectral Markov function is (F - sqrt H)/(2G)") {
  Fixture f(kEStar);
  for (const GapDivisor& div : {GapDivisor{{0.0, 1}}, GapDivisor{{0.2, -1}}, GapDivisor{{-0.3, 1}}}) {
    auto dm = discretize(make_isospectral(f.sys, f.eq, div), 1024);
    auto pp = divisor_to_pair(f.sys, f.bs, div);
    for (cd z : {cd(0.3, 0.4), cd(-1.5, 0.2), cd(2.0, 0.0), cd(0.05, 0.6)}) {
      const cd expect = (pp.F(z) - sqrtH(f.sys, z)) / (2.0 * pp.G(z));
      CHECK(std::abs(markov(dm, z) - expect) < 1e-10);
    }
  }
}

TEST_CASE("trace formula on a Szego measure") {
  Fixture f(kEDagger);
  auto m = build_model(discretize(make_poly_spec(f.sys, f.eq, Poly({1.0, 0.0, 1.0})), 2048), 160);
  for (int n = 80; n < 140; n += 9) {
    auto ep = extract_pair(f.bs, moment_window(m, n, 2), 2);
    const double y = roots(ep.G)[0].real();
    CHECK(std::abs(m.rt.a(n + 1) - (f.bs.c[1] - y)) <= 5e-3);
  }
}
