#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "fgl/errors.hpp"
#include "fgl/kernels.hpp"
#include "fgl/measures.hpp"

using namespace fgl;
using cd = std::complex<double>;

namespace {

const std::vector<double> kEStar{-1.0, -0.5, 0.5, 1.0};

struct Fixture {
  IntervalSystem sys;
  EquilibriumData eq;
  explicit Fixture(const std::vector<double>& ends) : sys(build_system(ends)), eq(equilibrium(sys, 64)) {}
};

// Modified Gram-Schmidt in long double on the Chebyshev basis T_k, independent of the
// three-term Stieltjes step. Returns monic (alpha, lambda) with lambda_1 = mass.
void gram_schmidt_oracle(const DiscreteMeasure& dm, int N, std::vector<double>& alpha,
                         std::vector<double>& lambda) {
  const size_t M = dm.nodes.size();
  const double lo = dm.nodes.front(), hi = dm.nodes[dm.ac_nodes - 1];
  std::vector<std::vector<long double>> q;
  for (int k = 0; k <= N; ++k) {
    std::vector<long double> t(M);
    for (size_t i = 0; i < M; ++i) {
      const long double u = (2.0L * dm.nodes[i] - lo - hi) / (hi - lo);
      t[i] = std::cos(k * std::acos(std::clamp(u, -1.0L, 1.0L)));
    }
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& p : q) {
        long double c = 0;
        for (size_t i = 0; i < M; ++i) c += dm.weights[i] * t[i] * p[i];
        for (size_t i = 0; i < M; ++i) t[i] -= c * p[i];
      }
    long double nn = 0;
    for (size_t i = 0; i < M; ++i) nn += dm.weights[i] * t[i] * t[i];
    for (auto& v : t) v /= std::sqrt(nn);
    q.push_back(std::move(t));
  }
  alpha.assign(N, 0.0);
  lambda.assign(N, 0.0);
  lambda[0] = dm.total_mass;
  for (int n = 0; n < N; ++n) {
    long double a = 0, b = 0;
    for (size_t i = 0; i < M; ++i) {
      a += dm.weights[i] * dm.nodes[i] * q[n][i] * q[n][i];
      b += dm.weights[i] * dm.nodes[i] * q[n][i] * q[n + 1][i];
    }
    alpha[n] = static_cast<double>(a);
    if (n + 1 < N) lambda[n + 1] = static_cast<double>(b * b);
  }
}

}  // namespace

TEST_CASE("total masses") {
  Fixture f(kEStar);
  CHECK(discretize(make_equilibrium_spec(f.sys, f.eq), 64).total_mass == doctest::Approx(1.0).epsilon(1e-10));
  auto plus = make_isospectral(f.sys, f.eq, {{0.0, 1}});
  REQUIRE(plus.torus_masses.size() == 1);
  CHECK(plus.torus_masses[0].mass == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(discretize(plus, 64).total_mass - 9.0 / 16) < 1e-9);
  auto minus = make_isospectral(f.sys, f.eq, {{0.0, -1}});
  CHECK(minus.torus_masses.empty());
  CHECK(std::abs(discretize(minus, 64).total_mass - 1.0 / 16) < 1e-9);
  auto edge = make_isospectral(f.sys, f.eq, {{-0.5, 0}});
  CHECK(edge.torus_masses.empty());
  CHECK(discretize(edge, 64).total_mass > 0.0);
  auto base = discretize(make_equilibrium_spec(f.sys, f.eq), 64);
  auto with = discretize(with_point_mass(make_equilibrium_spec(f.sys, f.eq), 0.0, 0.1), 64);
  CHECK(with.total_mass - base.total_mass == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("spec validation") {
  Fixture f(kEStar);
  auto eqs = make_equilibrium_spec(f.sys, f.eq);
  CHECK_THROWS_AS(with_point_mass(eqs, 0.75, 0.1), InputError);
  CHECK_THROWS_AS(with_point_mass(eqs, 0.0, -0.1), InputError);
  CHECK_THROWS_AS(with_point_mass(with_point_mass(eqs, 0.0, 0.1), 0.0, 0.2), InputError);
  CHECK_THROWS_AS(make_poly_spec(f.sys, f.eq, Poly({-0.1, 0.0, 1.0})), InputError);
  CHECK_NOTHROW(make_poly_spec(f.sys, f.eq, Poly({1.0, 0.0, 1.0})));
  CHECK_THROWS_AS(make_isospectral(f.sys, f.eq, {{0.0, 0}}), InputError);
}

TEST_CASE("Szego integral") {
  Fixture f(kEStar);
  auto s1 = szego_integral(make_equilibrium_spec(f.sys, f.eq));
  CHECK_FALSE(s1.minus_infinity);
  CHECK(std::isfinite(s1.value));
  auto s2 = szego_integral(make_poly_spec(f.sys, f.eq, Poly({1.0, 0.0, 1.0})));
  CHECK_FALSE(s2.minus_infinity);
  auto s3 = szego_integral(f.sys, f.eq, [](double x) { return (x < -0.75) ? 0.0 : 1.0; }, 512);
  CHECK(s3.minus_infinity);
}

TEST_CASE("Chebyshev single band recurrence") {
  Fixture f({-1.0, 1.0});
  auto dm = discretize(make_equilibrium_spec(f.sys, f.eq), 256);
  auto rt = recurrence(dm, 60);
  for (int n = 1; n <= 60; ++n) CHECK(std::abs(rt.a(n)) < 1e-10);
  CHECK(std::abs(rt.l(2) - 0.5) < 1e-10);
  for (int n = 3; n <= 60; ++n) CHECK(std::abs(rt.l(n) - 0.25) < 1e-10);
  std::vector<double> ga, gl;
  gram_schmidt_oracle(dm, 20, ga, gl);
  for (int n = 1; n <= 20; ++n) {
    CHECK(std::abs(rt.a(n) - ga[n - 1]) < 1e-10);
    CHECK(std::abs(rt.l(n) - gl[n - 1]) < 1e-10);
  }
  CHECK_THROWS_AS(recurrence(dm, 65), InputError);
}

TEST_CASE("recurrence against the Gram-Schmidt oracle on asymmetric measures") {
  Fixture f({-1.0, -0.4, 0.1, 1.0});
  auto spec = with_point_mass(make_poly_spec(f.sys, f.eq, Poly({1.0, 0.5, 1.0})), -0.2, 0.05);
  auto dm = discretize(spec, 128);
  auto rt = recurrence(dm, 20);
  std::vector<double> ga, gl;
  gram_schmidt_oracle(dm, 20, ga, gl);
  for (int n = 1; n <= 20; ++n) {
    CHECK(std::abs(rt.a(n) - ga[n - 1]) < 1e-10);
    CHECK(std::abs(rt.l(n) - gl[n - 1]) < 1e-10);
  }
}

TEST_CASE("E* equilibrium recurrence limits") {
  Fixture f(kEStar);
  auto spec = make_equilibrium_spec(f.sys, f.eq);
  auto rt = recurrence(discretize(spec, 1024), 101);
  auto hi = recurrence(discretize(spec, 4096), 101);
  double lo_l = 1e9, hi_l = -1e9;
  for (int n = 1; n <= 100; ++n) {
    CHECK(std::abs(rt.a(n)) < 1e-8);
    CHECK(std::abs(rt.l(n) - hi.l(n)) < 1e-10);
  }
  for (int n = 20; n <= 100; ++n) {
    lo_l = std::min(lo_l, rt.l(n));
    hi_l = std::max(hi_l, rt.l(n));
    CHECK(rt.l(n) > 0.0);
    if (n > 20) CHECK((rt.l(n) - 0.3125) * (rt.l(n - 1) - 0.3125) < 0.0);
  }
  CHECK(std::abs(lo_l - 1.0 / 16) < 1e-6);
  CHECK(std::abs(hi_l - 9.0 / 16) < 1e-6);
  CHECK(rt.l(2) == doctest::Approx(0.625).epsilon(1e-10));
  // Odd P_n vanish at 0, relative to the growing even neighbours.
  for (int n = 1; n < 100; n += 2)
    CHECK(std::abs(eval_orthonormal(rt, 0.0, n)) < 1e-10 * std::abs(eval_orthonormal(rt, 0.0, n + 1)));
}

TEST_CASE("SIMD and scalar backends give the same recurrence") {
  if (!kernels::avx2_available()) return;
  Fixture f({-1.0, -0.7, -0.4, 0.1, 0.5, 1.0});
  auto dm = discretize(make_poly_spec(f.sys, f.eq, Poly({1.0, 0.0, 1.0})), 512);
  const auto before = kernels::active_backend();
  kernels::set_backend(kernels::Backend::Scalar);
  auto a = recurrence(dm, 120);
  kernels::set_backend(kernels::Backend::Avx2);
  auto b = recurrence(dm, 120);
  kernels::set_backend(before);
  for (int n = 1; n <= 120; ++n) {
    CHECK(std::abs(a.a(n) - b.a(n)) < 1e-12);
    CHECK(std::abs(a.l(n) - b.l(n)) < 1e-12);
  }
}

TEST_CASE("discrete orthonormality") {
  Fixture f(kEStar);
  auto dm = discretize(make_poly_spec(f.sys, f.eq, Poly({1.0, 0.0, 1.0})), 512);
  auto m = build_model(dm, 101);
  CHECK(eval_orthonormal(m.rt, 0.3, 0) == doctest::Approx(1.0 / std::sqrt(dm.total_mass)));
  double worst = 0.0;
  for (int a = 0; a <= 50; ++a)
    for (int b = 0; b <= 50; ++b) {
      double s = 0.0;
      for (size_t k = 0; k < dm.nodes.size(); ++k)
        s += dm.weights[k] * eval_orthonormal(m.rt, dm.nodes[k], a) * eval_orthonormal(m.rt, dm.nodes[k], b);
      worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-9);
  auto atoms = build_model(discretize(with_point_mass(make_equilibrium_spec(f.sys, f.eq), 0.2, 0.3), 512), 101);
  worst = 0.0;
  for (int a = 0; a <= 50; ++a)
    for (int b = 0; b <= 50; ++b) {
      double s = 0.0;
      for (size_t k = 0; k < atoms.dm.nodes.size(); ++k) s += atoms.v[a][k] * atoms.v[b][k];
      worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-9);
  // P_n = p_n / sqrt(lambda_1 ... lambda_{n+1}).
  double norm = 1.0;
  for (int k = 1; k <= 6; ++k) norm *= m.rt.l(k);
  CHECK(std::abs(eval_monic(m.rt, 0.7, 5) / std::sqrt(norm) / eval_orthonormal(m.rt, 0.7, 5) - 1.0) < 1e-12);
}

TEST_CASE("Weyl functions and Green's functions") {
  Fixture f(kEStar);
  auto dm = discretize(make_equilibrium_spec(f.sys, f.eq), 1024);
  auto m = build_model(dm, 200);
  const cd z(0.3, 0.4);
  CHECK(std::abs(eval_weyl(m, z, 0) - markov(dm, z) / std::sqrt(dm.total_mass)) < 1e-14);
  const double big = 1e7;
  CHECK(std::abs(big * eval_weyl(m, big, 0) - std::sqrt(dm.total_mass)) < 1e-6);
  CHECK(std::abs(big * eval_weyl(m, big, 3)) < 1e-6);
  for (int n : {0, 1, 5, 10, 20}) {
    for (cd w : {cd(0.3, 0.4), cd(0.0, 0.3), cd(2.0, 0.0), cd(0.2, 0.0)}) {
      CHECK(std::abs(eval_weyl(m, w, n) - eval_weyl_direct(m, w, n)) < 1e-10);
      cd direct = 0.0;
      for (size_t k = 0; k < dm.nodes.size(); ++k) {
        const double p = m.P_at_node(n, k);
        direct += dm.weights[k] * p * p / (w - dm.nodes[k]);
      }
      CHECK(std::abs(green(m, w, n, 0) - direct) < 1e-10);
      CHECK(std::abs(green(m, w, n, -1) - green(m, w, n, 1) - 1.0 / std::sqrt(m.rt.l(n + 2))) < 1e-9);
    }
  }
  // The resolvent element <d_n, (J - z)^{-1} d_n> = -G(z, n, n) is Herglotz.
  for (int n = 0; n < 100; n += 7)
    for (double re : {-1.5, -0.75, 0.0, 0.6, 1.2})
      for (double im : {0.01, 0.1, 1.0}) CHECK(green(m, cd(re, im), n, 0).imag() < 0.0);
  CHECK_THROWS_AS(eval_weyl(m, dm.nodes[10], 3), DomainError);
}

TEST_CASE("Wronskian is -1 on gap probes") {
  Fixture f(kEStar);
  auto eqs = make_equilibrium_spec(f.sys, f.eq);
  std::vector<MeasureSpec> specs{eqs, make_poly_spec(f.sys, f.eq, Poly({1.0, 0.0, 1.0})),
                                 make_isospectral(f.sys, f.eq, {{0.1, 1}}),
                                 with_point_mass(eqs, 0.25, 0.2)};
  for (const auto& spec : specs) {
    auto m = build_model(discretize(spec, 1024), 400);
    CHECK(wronskian(m, 0.2, 0) == doctest::Approx(-1.0).epsilon(1e-13));
    double worst = 0.0;
    for (int p = 0; p < 20; ++p) {
      const double z = -0.5 + (p + 0.5) / 20.0;
      if (std::abs(z - 0.1) < 1e-9 || std::abs(z - 0.25) < 1e-9) continue;
      for (int n = 0; n <= 100; ++n) worst = std::max(worst, std::abs(wronskian(m, z, n) + 1.0));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("gap zeros") {
  Fixture one({-1.0, 1.0});
  auto m1 = build_model(discretize(make_equilibrium_spec(one.sys, one.eq), 256), 40);
  auto z1 = gap_zeros(m1, one.sys, 11);
  CHECK(z1.p.empty());
  Fixture f(kEStar);
  auto m = build_model(discretize(make_equilibrium_spec(f.sys, f.eq), 1024), 120);
  for (int n : {11, 31, 61}) {
    auto z = gap_zeros(m, f.sys, n);
    REQUIRE(z.p[0].size() == 1);
    CHECK(std::abs(z.p[0][0]) < 1e-10);
  }
  auto iso = build_model(discretize(make_isospectral(f.sys, f.eq, {{0.0, -1}}), 1024), 120);
  auto z = gap_zeros(iso, f.sys, 60);
  const auto near = [](const std::vector<double>& v) {
    return std::count_if(v.begin(), v.end(), [](double x) { return std::abs(x) < 1e-3; });
  };
  // Level 60 of the (0,-1) measure carries the divisor (0,-1): a P zero at 0.
  CHECK(near(z.p[0]) + near(z.q[0]) == 1);
  auto z61 = gap_zeros(iso, f.sys, 61);
  CHECK(near(z61.p[0]) + near(z61.q[0]) == 1);

  // Odd P_n of a symmetric measure vanish at 0, also when 0 carries an atom.
  auto atom = build_model(discretize(with_point_mass(make_equilibrium_spec(f.sys, f.eq), 0.0, 0.1), 1024), 120);
  for (int n : {21, 51}) {
    auto za = gap_zeros(atom, f.sys, n);
    REQUIRE(near(za.p[0]) == 1);
    CHECK(std::abs(za.p[0][0]) < 1e-10);
  }
  CHECK(near(gap_zeros(atom, f.sys, 50).p[0]) == 0);
}

TEST_CASE("strip") {
  Fixture f(kEStar);
  auto rt = recurrence(discretize(make_equilibrium_spec(f.sys, f.eq), 256), 40);
  auto s0 = strip(rt, 0);
  CHECK(s0.alpha == rt.alpha);
  CHECK(s0.lambda == rt.lambda);
  auto a = strip(strip(rt, 1), 1), b = strip(rt, 2);
  CHECK(a.alpha == b.alpha);
  CHECK(a.lambda == b.lambda);
  CHECK(strip(rt, 1).l(1) == rt.l(2));
  CHECK_THROWS_AS(strip(rt, 40), InputError);
}
