#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "alrlab/lame.hpp"
#include "alrlab/mode_field.hpp"
#include "alrlab/quadrature.hpp"
#include "oracles.hpp"

using namespace alrlab;
using testutil::rel_err;

namespace {
constexpr double kPi = 3.14159265358979323846;

double kappa_of(const LameParameters& p) {
  return (p.lambda + 3.0 * p.mu) / (p.lambda + p.mu);
}

// kappa z^m - m z conj(z)^(m-1): homogeneous solution, regular at the origin
PiecewiseModeField regular_solution(const LameParameters& p, int m) {
  PiecewiseModeField f = PiecewiseModeField::over({});
  f.add_pattern(0, kappa_of(p), m, m);
  f.add_pattern(0, -static_cast<double>(m), m, 2 - m);
  return f;
}
}  // namespace

TEST_CASE("check_convexity matches the sign conditions") {
  CHECK(check_convexity({1.0, 1.0}, 2));
  CHECK_FALSE(check_convexity({-3.0, 1.0}, 2));
  CHECK(check_convexity({-0.5, 1.0}, 3));
  CHECK_FALSE(check_convexity({-1.0, 1.0}, 2));
  CHECK_FALSE(check_convexity({1.0, -1.0}, 2));
  CHECK_THROWS_AS(check_convexity({1.0, 1.0}, 4), std::invalid_argument);
}

TEST_CASE("plasmon_constant closed forms") {
  CHECK(plasmon_constant({1.0, 1.0}, PlasmonFamily::ShearFamily) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(plasmon_constant({1.0, 1.0}, PlasmonFamily::AltFamily) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(plasmon_constant({0.0, 1.0}, PlasmonFamily::ShearFamily) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(plasmon_constant({-3.0, 1.0}, PlasmonFamily::ShearFamily), std::invalid_argument);

  std::mt19937 rng(7);
  for (int i = 0; i < 50; ++i) {
    const LameParameters p = testutil::random_convex(rng);
    const double cs = plasmon_constant(p, PlasmonFamily::ShearFamily);
    const double ca = plasmon_constant(p, PlasmonFamily::AltFamily);
    CHECK(cs < 0.0);
    CHECK(ca < 0.0);
    CHECK(rel_err(cs * ca, 1.0) < 1e-13);  // reciprocal pair
  }
}

TEST_CASE("plasmon_alpha sits in (0,1) and matches its pieces") {
  const PlasmonAlpha a = plasmon_alpha({1.0, 1.0});
  CHECK(a.alpha1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(a.alpha2 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(a.alpha == doctest::Approx(0.5).epsilon(1e-15));
  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    const PlasmonAlpha r = plasmon_alpha(testutil::random_convex(rng));
    CHECK(r.alpha > 0.0);
    CHECK(r.alpha < 1.0);
  }
}

TEST_CASE("kelvin_matrix frozen values") {
  const auto m2 = kelvin_matrix({1.0, 1.0}, {1.0, 0.0, 0.0}, 2);
  CHECK(m2[0][0] == doctest::Approx(-1.0 / (6.0 * kPi)).epsilon(1e-14));
  CHECK(m2[0][1] == doctest::Approx(0.0));
  CHECK(m2[1][0] == doctest::Approx(0.0));
  const auto m2b = kelvin_matrix({1.0, 1.0}, {0.0, 1.0, 0.0}, 2);
  CHECK(m2b[0][1] == doctest::Approx(0.0));
  const auto m3 = kelvin_matrix({1.0, 1.0}, {1.0, 0.0, 0.0}, 3);
  CHECK(m3[0][0] == doctest::Approx(-1.0 / (3.0 * kPi)).epsilon(1e-14));
  CHECK_THROWS_AS(kelvin_matrix({1.0, 1.0}, {0.0, 0.0, 0.0}, 2), std::invalid_argument);
}

TEST_CASE("evaluate on simple patterns") {
  PiecewiseModeField f = PiecewiseModeField::over({});
  f.add_pattern(0, 1.0, 1, 1);  // u = (x1, x2)
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const double x = coord(rng), y = coord(rng);
    const auto u = evaluate_xy(f, x, y);
    CHECK(std::abs(u[0] - x) < 1e-14);
    CHECK(std::abs(u[1] - y) < 1e-14);
  }

  PiecewiseModeField g = PiecewiseModeField::over({});
  g.add_pattern(0, Complex(0.0, 1.0), 1, 1);  // u = (-x2, x1)
  const auto w = evaluate_xy(g, 0.3, -0.7);
  CHECK(std::abs(w[0] - 0.7) < 1e-14);
  CHECK(std::abs(w[1] - 0.3) < 1e-14);
}

TEST_CASE("piece lookup takes the requested side at a boundary") {
  PiecewiseModeField f = PiecewiseModeField::over({1.0, 2.0});
  f.add_pattern(0, 1.0, 0, 0);
  f.add_pattern(1, 2.0, 0, 0);
  f.add_pattern(2, 3.0, -2, 0);
  CHECK(f.piece_at(1.0, Side::Inner).r_lo == 0.0);
  CHECK(f.piece_at(1.0, Side::Outer).r_hi == 2.0);
  CHECK(f.piece_at(1.5, Side::Inner).r_lo == 1.0);
  CHECK(std::isinf(f.piece_at(5.0, Side::Outer).r_hi));
  CHECK_THROWS_AS((void)PiecewiseModeField::over({2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("accumulate refines mismatched partitions") {
  PiecewiseModeField a = PiecewiseModeField::over({1.0});
  a.add_pattern(0, 0.8, 2, 2);
  a.add_pattern(1, 0.8, -2, 0);
  PiecewiseModeField b = PiecewiseModeField::over({2.0});
  b.add_pattern(0, -0.4, 1, 1);
  b.add_pattern(1, 1.1, -1, 1);
  PiecewiseModeField sum = a;
  sum.accumulate(b, Complex(2.0, 0.0));
  REQUIRE(sum.pieces.size() == 3);
  for (double r : {0.4, 1.3, 2.9}) {
    for (double th : {0.0, 1.1, 4.4}) {
      const auto ua = evaluate_polar(a, r, th);
      const auto ub = evaluate_polar(b, r, th);
      const auto us = evaluate_polar(sum, r, th);
      for (int i = 0; i < 2; ++i) CHECK(std::abs(us[i] - (ua[i] + 2.0 * ub[i])) < 1e-13);
    }
  }
}

TEST_CASE("conormal of the basic fields") {
  std::mt19937 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const LameParameters p = testutil::random_convex(rng);
    const double lm = p.lambda + p.mu;

    PiecewiseModeField dil = PiecewiseModeField::over({});
    dil.add_pattern(0, 1.0, 1, 1);  // u = x, traction 2(lambda+mu) nu
    const AngularFunction td = conormal(p, dil, 1.3);
    for (double th : {0.2, 2.0, 5.5}) {
      const auto t = td.evaluate(th);
      CHECK(std::abs(t[0] - 2.0 * lm * std::cos(th)) < 1e-12);
      CHECK(std::abs(t[1] - 2.0 * lm * std::sin(th)) < 1e-12);
    }

    PiecewiseModeField rot = PiecewiseModeField::over({});
    rot.add_pattern(0, Complex(0.0, 1.0), 1, 1);  // u = (-x2, x1), traction-free
    CHECK(conormal(p, rot, 0.9).max_abs() < 1e-14);

    PiecewiseModeField sh = PiecewiseModeField::over({});
    sh.add_pattern(0, 1.0, 1, -1);  // u = (x1, -x2), traction 2 mu (n1, -n2)
    const AngularFunction ts = conormal(p, sh, 2.0);
    for (double th : {0.7, 3.0}) {
      const auto t = ts.evaluate(th);
      CHECK(std::abs(t[0] - 2.0 * p.mu * std::cos(th)) < 1e-12);
      CHECK(std::abs(t[1] + 2.0 * p.mu * std::sin(th)) < 1e-12);
    }

    PiecewiseModeField rigid = PiecewiseModeField::over({});
    rigid.add_pattern(0, Complex(0.4, -0.3), 0, 0);
    CHECK(conormal(p, rigid, 1.0).max_abs() < 1e-15);
  }
}

TEST_CASE("conormal requires a side exactly at a piece boundary") {
  const LameParameters p{1.0, 1.0};
  PiecewiseModeField f = PiecewiseModeField::over({1.0});
  f.add_pattern(0, 1.0, 1, 1);
  f.add_pattern(1, 0.5, -1, 1);
  CHECK_THROWS_AS((void)conormal(p, f, 1.0), std::invalid_argument);
  const AngularFunction ti = conormal(p, f, 1.0, Side::Inner);
  const AngularFunction to = conormal(p, f, 1.0, Side::Outer);
  CHECK(ti.max_abs() > 0.0);
  CHECK(std::abs(ti.plus_at(1) - to.plus_at(1)) > 1e-3);  // genuinely different limits
  // complex modulus factor scales the whole trace
  const Complex s(0.3, 0.1);
  const AngularFunction tis = conormal(p, f, 1.0, Side::Inner, s);
  CHECK(std::abs(tis.plus_at(1) - s * ti.plus_at(1)) < 1e-15);
}

TEST_CASE("angular component extraction round-trips") {
  AngularFunction g;
  // encode f1 + i f2 and f1 - i f2 for f1 = 2 cos t, f2 = 4 cos 2t - sin t:
  // f1 + i f2 = e^{it} + e^{-it} + 2i e^{2it} + 2i e^{-2it} + (1/2) e^{-it}...
  g.plus[1] = Complex(1.0, 0.0);
  g.plus[-1] = Complex(1.0, 0.0);
  g.minus[1] = Complex(1.0, 0.0);
  g.minus[-1] = Complex(1.0, 0.0);            // 2 cos t in component 0
  g.plus[2] = Complex(0.0, 2.0);
  g.plus[-2] = Complex(0.0, 2.0);
  g.minus[2] = Complex(0.0, -2.0);
  g.minus[-2] = Complex(0.0, -2.0);           // 4 cos 2t in component 1
  g.plus[1] += Complex(-0.5, 0.0);
  g.plus[-1] += Complex(0.5, 0.0);
  g.minus[1] += Complex(0.5, 0.0);
  g.minus[-1] += Complex(-0.5, 0.0);  // -sin t in component 1
  for (double th : {0.0, 0.9, 2.2, 4.0}) {
    const auto val = g.evaluate(th);
    CHECK(std::abs(val[0] - 2.0 * std::cos(th)) < 1e-14);
    CHECK(std::abs(val[1] - (4.0 * std::cos(2.0 * th) - std::sin(th))) < 1e-14);
  }
  CHECK(std::abs(g.component_cos(0, 1) - 2.0) < 1e-14);
  CHECK(std::abs(g.component_cos(1, 2) - 4.0) < 1e-14);
  CHECK(std::abs(g.component_sin(1, 1) - (-1.0)) < 1e-14);
  CHECK(std::abs(g.component_sin(0, 1)) < 1e-14);
  CHECK(std::abs(g.component_cos(1, 1)) < 1e-14);
}

TEST_CASE("lame_apply annihilates homogeneous solutions") {
  std::mt19937 rng(23);
  for (int rep = 0; rep < 8; ++rep) {
    const LameParameters p = testutil::random_convex(rng);
    for (int m : {2, 3, 5, 9}) {
      PiecewiseModeField f = regular_solution(p, m);
      const PiecewiseModeField lf = lame_apply(p, f);
      for (const Piece& pc : lf.pieces)
        for (const Term& t : pc.terms) CHECK(std::abs(t.c) < 1e-10);
    }
  }
  // rigid translation
  PiecewiseModeField c = PiecewiseModeField::over({});
  c.add_pattern(0, Complex(0.3, 0.8), 0, 0);
  CHECK(lame_apply({1.0, 2.0}, c).pieces[0].terms.empty());
}

TEST_CASE("lame_apply closed form vs central differences on a non-solution") {
  const LameParameters p{1.4, 0.7};
  PiecewiseModeField f = PiecewiseModeField::over({});
  f.add_pattern(0, 1.0, 2, 1);  // u = r^2 (cos t, sin t): L u = 3(lambda+2mu)(x/r)
  const PiecewiseModeField lf = lame_apply(p, f);

  const double want = 3.0 * (p.lambda + 2.0 * p.mu);
  bool found = false;
  for (const Term& t : lf.pieces[0].terms)
    if (t.spin == 1 && t.p == 0 && t.m == 1) {
      CHECK(rel_err(t.c.real(), want) < 1e-14);
      CHECK(std::abs(t.c.imag()) < 1e-14);
      found = true;
    }
  CHECK(found);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> rad(0.4, 2.0), ang(0.0, 2.0 * kPi);
  for (int i = 0; i < 25; ++i) {
    const double r = rad(rng), th = ang(rng);
    const double x = r * std::cos(th), y = r * std::sin(th);
    const auto closed = evaluate_xy(lf, x, y);
    const auto fd = fd_lame_apply(p, f, x, y, 1e-2);
    for (int c2 = 0; c2 < 2; ++c2)
      CHECK(std::abs(closed[c2] - fd[c2]) / std::max(1.0, std::abs(closed[c2])) < 1e-6);
  }
}

TEST_CASE("bilinear_P closed forms on elementary fields") {
  const LameParameters p{1.3, 0.6};

  PiecewiseModeField dil = PiecewiseModeField::over({});
  dil.add_pattern(0, 1.0, 1, 1);  // u = x: integrand 4(lambda+mu)
  const Complex pd = bilinear_P(p, dil, dil, 0.0, 1.0);
  CHECK(rel_err(pd.real(), 4.0 * (p.lambda + p.mu) * kPi) < 1e-14);
  CHECK(std::abs(pd.imag()) < 1e-15);

  // u1 = x2, u2 = 0: integrand mu
  PiecewiseModeField shear = PiecewiseModeField::over({});
  shear.add_term(0, Complex(0.0, -0.5), 1, 1, +1);
  shear.add_term(0, Complex(0.0, 0.5), 1, -1, +1);
  shear.add_term(0, Complex(0.0, -0.5), 1, 1, -1);
  shear.add_term(0, Complex(0.0, 0.5), 1, -1, -1);
  const auto v = evaluate_xy(shear, 0.7, -0.4);
  CHECK(std::abs(v[0] - (-0.4)) < 1e-15);
  CHECK(std::abs(v[1]) < 1e-15);
  CHECK(rel_err(bilinear_P(p, shear, shear, 0.0, 2.0).real(), p.mu * kPi * 4.0) < 1e-14);

  PiecewiseModeField rigid = PiecewiseModeField::over({});
  rigid.add_pattern(0, Complex(1.0, -2.0), 0, 0);
  rigid.add_pattern(0, Complex(0.0, 0.5), 1, 1);  // rotation is also energy-free
  CHECK(std::abs(bilinear_P(p, rigid, rigid, 0.0, 3.0)) < 1e-15);
  CHECK(std::abs(bilinear_P(p, rigid, dil, 0.0, 3.0)) < 1e-15);
}

TEST_CASE("bilinear_P orthogonality across distinct angular blocks") {
  const LameParameters p{0.9, 1.1};
  PiecewiseModeField a = PiecewiseModeField::over({});
  a.add_pattern(0, 0.7, 2, 2);
  PiecewiseModeField b = PiecewiseModeField::over({});
  b.add_pattern(0, Complex(0.2, 0.4), 3, 3);
  CHECK(std::abs(bilinear_P(p, a, b, 0.0, 1.5)) == 0.0);
}

TEST_CASE("bilinear_P agrees with the quadrature oracle on a layered field") {
  const LameParameters p{1.7, 0.8};
  PiecewiseModeField f = PiecewiseModeField::over({1.0, 2.0});
  f.add_pattern(0, 0.6, 2, 2);
  f.add_pattern(0, kappa_of(p), 3, 3);
  f.add_pattern(1, 0.3, -1, 1);
  f.add_pattern(1, Complex(0.0, 0.9), 2, 2);
  f.add_pattern(2, 1.2, -2, 2);
  f.add_pattern(2, -0.5, -3, 1);

  const double closed = bilinear_P(p, f, f).real();
  const double quad = bilinear_P_quadrature(p, f, f, 0.0, kInf).real();
  CHECK(closed > 0.0);
  CHECK(rel_err(quad, closed) < 1e-7);

  // restriction to one annulus
  const double closed_mid = bilinear_P(p, f, f, 1.0, 2.0).real();
  const double quad_mid = bilinear_P_quadrature(p, f, f, 1.0, 2.0).real();
  CHECK(rel_err(quad_mid, closed_mid) < 1e-8);
}

TEST_CASE("bilinear_P is symmetric for real fields and rejects divergence") {
  const LameParameters p{1.0, 1.0};
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int rep = 0; rep < 6; ++rep) {
    PiecewiseModeField u = PiecewiseModeField::over({1.5});
    PiecewiseModeField v = PiecewiseModeField::over({1.5});
    for (int m = 1; m <= 3; ++m) {
      u.add_pattern(0, coef(rng), m + 1, m);
      v.add_pattern(0, coef(rng), m, m);
      u.add_pattern(1, coef(rng), -m - 1, m);
      v.add_pattern(1, coef(rng), -m, -m);
    }
    const Complex puv = bilinear_P(p, u, v);
    const Complex pvu = bilinear_P(p, v, u);
    CHECK(std::abs(puv - pvu) < 1e-12 * std::max(1.0, std::abs(puv)));
  }

  PiecewiseModeField bad = PiecewiseModeField::over({});
  bad.add_pattern(0, 1.0, 1, 1);  // dilation over the whole plane: divergent
  CHECK_THROWS_AS((void)bilinear_P(p, bad, bad), std::domain_error);
}

TEST_CASE("circle products match trapezoid integration") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  AngularFunction f, g;
  for (int m = -4; m <= 4; ++m) {
    f.plus[m] = Complex(coef(rng), coef(rng));
    f.minus[m] = Complex(coef(rng), coef(rng));
    g.plus[m] = Complex(coef(rng), coef(rng));
    g.minus[m] = Complex(coef(rng), coef(rng));
  }
  const double r = 1.7;
  const int n = 512;
  Complex dot(0.0), inner(0.0);
  for (int j = 0; j < n; ++j) {
    const double th = 2.0 * kPi * j / n;
    const auto a = f.evaluate(th);
    const auto b = g.evaluate(th);
    dot += (a[0] * b[0] + a[1] * b[1]) * (2.0 * kPi * r / n);
    inner += (a[0] * std::conj(b[0]) + a[1] * std::conj(b[1])) * (2.0 * kPi * r / n);
  }
  CHECK(std::abs(circle_dot(f, g, r) - dot) < 1e-12 * std::max(1.0, std::abs(dot)));
  CHECK(std::abs(circle_inner(f, g, r) - inner) < 1e-12 * std::max(1.0, std::abs(inner)));
}

TEST_CASE("green identity residual is small for smooth fields") {
  const LameParameters p{1.0, 1.0};

  PiecewiseModeField rigid = PiecewiseModeField::over({});
  rigid.add_pattern(0, Complex(0.7, 0.1), 0, 0);
  CHECK(green_identity_residual(p, rigid, rigid, 1.0) < 1e-9);

  // homogeneous solution pair: volume term vanishes analytically
  PiecewiseModeField u = regular_solution(p, 3);
  PiecewiseModeField v = regular_solution(p, 3);
  CHECK(green_identity_residual(p, u, v, 1.0) < 1e-9);

  // non-solutions exercise all three terms (polynomial components, so the
  // finite-difference operators are essentially exact)
  PiecewiseModeField w = PiecewiseModeField::over({});
  w.add_pattern(0, 1.0, 3, 1);
  PiecewiseModeField w2 = PiecewiseModeField::over({});
  w2.add_pattern(0, 0.8, 2, 2);
  w2.add_pattern(0, -0.3, 1, 1);
  CHECK(green_identity_residual(p, w, w2, 1.3) < 1e-8);
  CHECK(green_identity_residual(p, w2, w, 1.3) < 1e-8);
}

TEST_CASE("dissipated energy is (delta/2) P and nonnegative") {
  const LameParameters p{1.0, 1.0};
  PiecewiseModeField f = PiecewiseModeField::over({1.0});
  f.add_pattern(0, 0.9, 2, 2);
  f.add_pattern(1, 0.4, -2, 2);
  const double base = bilinear_P(p, f, f).real();
  for (double d : {1e-3, 0.1, 1.0}) CHECK(rel_err(dissipated_energy(d, f, p), 0.5 * d * base) < 1e-15);
  CHECK_THROWS_AS(dissipated_energy(0.0, f, p), std::invalid_argument);
  PiecewiseModeField z = PiecewiseModeField::over({});
  CHECK(dissipated_energy(0.5, z, p) == 0.0);
}

TEST_CASE("mode structure bookkeeping accepts the intended shape and rejects violations") {
  PiecewiseModeField good = PiecewiseModeField::over({1.0, 2.0});
  good.k = 3;
  good.add_pattern(0, 1.0, 3, 3);
  good.add_pattern(0, -3.0, 3, -1);
  good.add_pattern(1, 0.4, -1, 1);
  good.add_pattern(1, 0.2, 5, 5);
  good.add_pattern(2, 1.0, -3, 3);
  CHECK_NOTHROW(validate_mode_structure(good));

  PiecewiseModeField bad_order = good;
  bad_order.add_pattern(1, 1.0, 2, 2);  // order 2 not in {1,3,5}
  CHECK_THROWS_AS(validate_mode_structure(bad_order), std::logic_error);

  PiecewiseModeField bad_core = good;
  bad_core.add_pattern(0, 1.0, -3, 3);
  CHECK_THROWS_AS(validate_mode_structure(bad_core), std::logic_error);

  PiecewiseModeField bad_ext = good;
  bad_ext.add_pattern(2, 1.0, 0, 3);
  CHECK_THROWS_AS(validate_mode_structure(bad_ext), std::logic_error);
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  const Quadrature1D q = gauss_legendre(12, 0.0, 2.0);
  double s0 = 0.0, s1 = 0.0;
  for (int i = 0; i < 12; ++i) {
    s0 += q.w[i] * std::pow(q.x[i], 7);
    s1 += q.w[i] * std::exp(q.x[i]);
  }
  CHECK(rel_err(s0, std::pow(2.0, 8) / 8.0) < 1e-13);
  CHECK(rel_err(s1, std::exp(2.0) - 1.0) < 1e-13);
}
