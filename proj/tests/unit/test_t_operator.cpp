#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"
#include "expect_error.hpp"
#include "hmcert/t_operator.hpp"
#include "oracles.hpp"

using namespace hmcert;

namespace {

constexpr double kTol = 1e-7;

BoundaryMap map_on(const CurveSpec& cs, const MapSpec& ms) {
  const JordanCurve g = build_curve(cs);
  return BoundaryMap(g, build_param(ms, g.length()));
}

// Knots that hold f constant on [2, 3].
MapSpec flat_knots(double length) {
  const double slope = length / (oracle::two_pi - 1.0);
  return MapSpec::knots({0.0, 1.0, 2.0, 3.0, 4.5, oracle::two_pi},
                        {0.0, slope, 2.0 * slope, 2.0 * slope, 3.5 * slope, length});
}

std::vector<MapSpec> monotone_maps(double length) {
  return {MapSpec::identity(), MapSpec::sin_perturbed(0.5, 1), MapSpec::sin_perturbed(0.5, 2),
          MapSpec::sin_perturbed(1.0, 1), flat_knots(length)};
}

std::vector<CurveSpec> convex_curves() {
  return {CurveSpec::circle(), CurveSpec::ellipse(2, 1), CurveSpec::ellipse(5, 1),
          CurveSpec::polar_cosine(0.08, 3)};
}

double max_adjacent_jump(const TProfile& p) {
  double d = std::abs(p.values.front() - p.values.back());
  for (std::size_t i = 1; i < p.values.size(); ++i) d = std::max(d, std::abs(p.values[i] - p.values[i - 1]));
  return d;
}

}  // namespace

TEST_CASE("unit circle with the identity gives T = 1 on both routes") {
  const BoundaryMap m = map_on(CurveSpec::circle(), MapSpec::identity());
  for (double tau : {0.0, 0.4, 2.0, oracle::pi, 5.9}) {
    CHECK(std::abs(t_singular(m, tau, kTol).value - 1.0) < 1e-8);
    CHECK(std::abs(t_cotangent(m, tau, kTol).value - 1.0) < 1e-8);
  }
  const auto p = t_profile(m, 256, kTol);
  CHECK(std::abs(p.min_value - 1.0) < 1e-8);
  for (double j : boundary_jacobian(m, p)) CHECK(std::abs(j - 1.0) < 1e-8);
}

TEST_CASE("cotangent integrand on the circle is (1 + cos u) / 2 pi") {
  const BoundaryMap m = map_on(CurveSpec::circle(), MapSpec::identity());
  for (double u : oracle::uniform_samples(30, -3.1, 3.1, 4)) {
    CHECK(t_cotangent_integrand(m, 0.7, u) == doctest::Approx((1.0 + std::cos(u)) / oracle::two_pi).epsilon(1e-9));
  }
  for (double t : oracle::uniform_samples(30, 0.0, oracle::two_pi, 5)) {
    if (std::abs(t - 0.7) > 1e-3) {
      CHECK(t_singular_integrand(m, 0.7, t) == doctest::Approx(1.0 / oracle::two_pi).epsilon(1e-9));
    }
  }
}

TEST_CASE("circle T matches the trapezoid oracle for perturbed parametrizations") {
  struct Case {
    double a;
    int k;
  };
  for (const Case c : {Case{1.0, 1}, Case{0.5, 1}, Case{0.3, 3}, Case{0.1, 7}}) {
    const BoundaryMap m = map_on(CurveSpec::circle(), MapSpec::sin_perturbed(c.a, c.k));
    auto f = [&](double t) { return t - c.a * std::sin(c.k * t); };
    auto fp = [&](double t) { return 1.0 - c.a * c.k * std::cos(c.k * t); };
    for (double tau : oracle::uniform_samples(6, 0.0, oracle::two_pi, 12)) {
      const double expected = oracle::circle_T(f, fp, tau, 8192);
      CAPTURE(c.a);
      CAPTURE(tau);
      CHECK(std::abs(t_singular(m, tau, kTol).value - expected) < 2 * kTol);
      CHECK(std::abs(t_cotangent(m, tau, kTol).value - expected) < 2 * kTol);
    }
  }
}

TEST_CASE("ellipse boundary Jacobian matches the elliptic-integral oracle") {
  for (const auto& [a, b] : {std::pair{2.0, 1.0}, std::pair{5.0, 1.0}}) {
    const BoundaryMap m = map_on(CurveSpec::ellipse(a, b), MapSpec::identity());
    const double c = m.param().derivative(0.0);
    for (double tau : {0.0, 0.5, 1.3, oracle::pi / 2, 3.0, 4.4}) {
      const double expected = oracle::ellipse_identity_J(a, b, tau);
      CAPTURE(a);
      CAPTURE(tau);
      CHECK(std::abs(c * t_singular(m, tau, kTol).value - expected) < 10 * c * kTol);
      CHECK(std::abs(c * t_cotangent(m, tau, kTol).value - expected) < 10 * c * kTol);
    }
  }
}

TEST_CASE("convex ellipse has positive T") {
  const BoundaryMap m = map_on(CurveSpec::ellipse(2, 1), MapSpec::identity());
  for (double tau : {0.0, 1.0, 2.5}) CHECK(t_singular(m, tau, kTol).value > 0.0);
  CHECK(t_profile(m, 256, kTol).min_value > 0.0);
}

TEST_CASE("T is 2 pi periodic in tau") {
  for (const auto& cs : {CurveSpec::ellipse(2, 1), CurveSpec::polar_cosine(0.3, 3)}) {
    const BoundaryMap m = map_on(cs, MapSpec::sin_perturbed(0.5, 2));
    for (double tau : {0.3, 2.2, 4.0}) {
      CHECK(t_cotangent(m, tau + oracle::two_pi, kTol).value ==
            doctest::Approx(t_cotangent(m, tau, kTol).value).epsilon(1e-9));
      CHECK(t_singular(m, tau - oracle::two_pi, kTol).value ==
            doctest::Approx(t_singular(m, tau, kTol).value).epsilon(1e-9));
    }
  }
}

TEST_CASE("the two routes agree within 2 tol") {
  const std::vector<CurveSpec> curves = {CurveSpec::circle(), CurveSpec::ellipse(2, 1), CurveSpec::ellipse(5, 1),
                                         CurveSpec::polar_cosine(0.3, 3), CurveSpec::polar_cosine(0.2, 5)};
  for (const auto& cs : curves) {
    const JordanCurve g = build_curve(cs);
    for (const auto& ms : monotone_maps(g.length())) {
      const BoundaryMap m(g, build_param(ms, g.length()));
      for (int i = 0; i < 8; ++i) {
        const double tau = oracle::two_pi * (i + 0.37) / 8;
        CAPTURE(cs.id());
        CAPTURE(ms.id());
        CAPTURE(tau);
        CHECK(std::abs(t_singular(m, tau, kTol).value - t_cotangent(m, tau, kTol).value) <= 2 * kTol);
      }
    }
  }
}

TEST_CASE("three-lobed polar curve: the routes agree on a 256-point grid") {
  const BoundaryMap m = map_on(CurveSpec::polar_cosine(0.3, 3), MapSpec::identity());
  const auto s = t_profile(m, 256, kTol, Route::singular_kernel);
  const auto c = t_profile(m, 256, kTol, Route::cotangent);
  CHECK(profile_distance(s, c) <= 2 * kTol);
  const auto both = t_profile(m, 256, kTol);
  CHECK(both.max_route_gap <= 2 * kTol);
  CHECK(both.max_error() < kTol);
  // This curve is not convex and T dips below zero.
  CHECK(both.min_value < 0.0);
}

TEST_CASE("profile continuity improves under grid refinement") {
  const BoundaryMap m = map_on(CurveSpec::circle(), MapSpec::sin_perturbed(1.0, 1));
  double prev = 1e300;
  for (int n : {64, 128, 256, 512}) {
    const auto p = t_profile(m, n, kTol);
    const double jump = max_adjacent_jump(p);
    CAPTURE(n);
    CHECK(jump < prev);
    prev = jump;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("boundary Jacobian is f' T") {
  const BoundaryMap flat = map_on(CurveSpec::circle(), MapSpec::sin_perturbed(1.0, 1));
  const auto p = t_profile(flat, 64, kTol);
  const auto J = boundary_jacobian(flat, p);
  CHECK(J[0] == 0.0);
  for (std::size_t i = 0; i < J.size(); ++i) CHECK(J[i] == doctest::Approx(flat.param().derivative(p.taus[i]) * p.values[i]));

  const BoundaryMap strict = map_on(CurveSpec::polar_cosine(0.3, 3), MapSpec::sin_perturbed(0.3, 2));
  const auto q = t_profile(strict, 128, kTol);
  const auto Js = boundary_jacobian(strict, q);
  for (std::size_t i = 0; i < Js.size(); ++i) CHECK((Js[i] > 0) == (q.values[i] > 0));
}

TEST_CASE("convex curves give positive T for every monotone parametrization") {
  for (const auto& cs : convex_curves()) {
    const JordanCurve g = build_curve(cs);
    for (const auto& ms : monotone_maps(g.length())) {
      const BoundaryMap m(g, build_param(ms, g.length()));
      CAPTURE(cs.id());
      CAPTURE(ms.id());
      CHECK(t_profile(m, 64, kTol).min_value > 0.0);
    }
  }
}

TEST_CASE("T profiles of mollified maps converge to the unmollified profile") {
  const JordanCurve g = build_curve(CurveSpec::ellipse(2, 1));
  for (const auto& ms : {MapSpec::sin_perturbed(1.0, 1), flat_knots(g.length())}) {
    const auto f = build_param(ms, g.length());
    const auto base = t_profile(BoundaryMap(g, f), 64, kTol);
    double prev = 1e300;
    for (int n : {4, 8, 16, 32}) {
      const double d = profile_distance(t_profile(BoundaryMap(g, mollify(f, n)), 64, kTol), base);
      CAPTURE(ms.id());
      CAPTURE(n);
      CHECK(d < prev);
      prev = d;
    }
  }
}

TEST_CASE("dominating function on the unit circle") {
  const BoundaryMap m = map_on(CurveSpec::circle(), MapSpec::identity());
  const auto db = dominating_bound(m, m.curve().tangent_modulus());
  for (double t : oracle::uniform_samples(200, 1e-6, oracle::pi, 30)) CHECK(db.Q(t) <= oracle::pi / 8 * (1 + 1e-12));
  CHECK(db.integral_value <= oracle::pi * oracle::pi / 4 * (1 + 1e-12));
  CHECK(db.relative_gap() < 1e-6);
}

TEST_CASE("dominating integral scales by at most 8 when L doubles") {
  const auto linear = ModulusOfContinuity::closed_form([](double u) { return u; }, [](double x) { return 0.5 * x * x; }, 1.0);
  const BoundaryMap one = map_on(CurveSpec::circle(), MapSpec::identity());
  const BoundaryMap two = map_on(CurveSpec::circle(), MapSpec::sin_perturbed(1.0, 1));
  REQUIRE(two.param().lipschitz() == doctest::Approx(2.0 * one.param().lipschitz()));
  const double r = dominating_bound(two, linear).integral_value / dominating_bound(one, linear).integral_value;
  CHECK(r <= 8.0 * (1 + 1e-9));
  CHECK(r == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("direct and identity evaluations of the dominating integral agree") {
  for (const auto& cs : {CurveSpec::ellipse(2, 1), CurveSpec::polar_cosine(0.3, 3)}) {
    const BoundaryMap m = map_on(cs, MapSpec::identity());
    const auto db = dominating_bound(m, m.curve().tangent_modulus());
    CAPTURE(cs.id());
    CHECK(std::isfinite(db.integral_value));
    CHECK(db.relative_gap() < 1e-6);
    // Oracle: Simpson on a logarithmic grid of the same integrand.
    const double direct = 2.0 * oracle::simpson([&](double x) { return std::exp(x) * db.Q(std::exp(x)); },
                                                std::log(1e-12), std::log(oracle::pi), 200000);
    CHECK(db.integral_value == doctest::Approx(direct).epsilon(1e-6));
  }
}

TEST_CASE("Q dominates the normalized singular integrand") {
  const std::vector<std::pair<CurveSpec, MapSpec>> cases = {
      {CurveSpec::circle(), MapSpec::sin_perturbed(1.0, 1)},
      {CurveSpec::ellipse(2, 1), MapSpec::identity()},
      {CurveSpec::ellipse(5, 1), MapSpec::sin_perturbed(0.5, 2)},
      {CurveSpec::polar_cosine(0.3, 3), MapSpec::identity()}};
  for (const auto& [cs, ms] : cases) {
    const BoundaryMap m = map_on(cs, ms);
    const auto db = dominating_bound(m, m.curve().tangent_modulus());
    const int n = 128;
    double worst = -1e300;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double tau = oracle::two_pi * i / n;
        const double t = oracle::two_pi * j / n;
        double d = std::remainder(t - tau, oracle::two_pi);
        const double s = std::sin(0.5 * d);
        const double lhs = std::abs(kernel_KF(m, t, tau)) / (2.0 * s * s) / oracle::two_pi;
        worst = std::max(worst, lhs - (db.Q(std::abs(d)) * (1 + 1e-6) + 1e-12));
      }
    }
    CAPTURE(cs.id());
    CHECK(worst <= 0.0);
  }
}

TEST_CASE("invalid arguments are rejected") {
  const BoundaryMap m = map_on(CurveSpec::circle(), MapSpec::identity());
  CHECK(HMCERT_THROWN_CODE(t_singular(m, 0.0, 1e-12)) == ErrorCode::invalid_params);
  CHECK(HMCERT_THROWN_CODE(t_profile(m, 32, kTol)) == ErrorCode::invalid_params);
}

TEST_CASE("sampled curve with knot parametrization") {
  std::vector<Point> pts;
  for (int i = 0; i < 400; ++i) {
    const double t = oracle::two_pi * i / 400;
    pts.push_back(std::polar(1.0 + 0.1 * std::cos(2 * t), t));
  }
  const JordanCurve g = build_curve(CurveSpec::points(pts));
  const BoundaryMap m(g, build_param(flat_knots(g.length()), g.length()));
  const auto p = t_profile(m, 64, 1e-6);
  CHECK(p.max_route_gap <= 2e-6);
  CHECK(p.min_value > 0.0);
}

namespace {

// Composite 5-point Gauss-Legendre over [-pi, pi] of the kernel-route
// integrand built from positions only.
double position_T(const BoundaryMap& m, double tau, int pieces_per_side) {
  static constexpr double x[3] = {0.0, 0.5384693101056831, 0.9061798459386640};
  static constexpr double w[3] = {0.5688888888888889, 0.4786286704993665, 0.2369268850561891};
  const JordanCurve& g = m.curve();
  const double s_tau = m.param()(tau);
  const Point z0 = g.position(s_tau);
  const Point n0 = Point(0.0, 1.0) * g.tangent(s_tau);
  auto integrand = [&](double u) {
    const Point d = g.position(m.param()(tau + u)) - z0;
    const double half = std::sin(0.5 * u);
    return (std::conj(d) * n0).real() / (2.0 * half * half) / oracle::two_pi;
  };
  const double h = oracle::two_pi / (2 * pieces_per_side);
  double sum = 0.0;
  for (int i = 0; i < 2 * pieces_per_side; ++i) {
    const double c = -oracle::pi + (i + 0.5) * h;
    double piece = w[0] * integrand(c);
    for (int j = 1; j < 3; ++j) piece += w[j] * (integrand(c - 0.5 * h * x[j]) + integrand(c + 0.5 * h * x[j]));
    sum += 0.5 * h * piece;
  }
  return sum;
}

}  // namespace

TEST_CASE("sharp bends and knot kinks: both routes match a position-only oracle") {
  struct Case {
    CurveSpec curve;
    bool flat;
    double tau;
  };
  // Eleven narrow lobes, and a tau inside the flat interval of the knot map.
  const std::vector<Case> cases = {{CurveSpec::polar_cosine(0.45, 11), false, 2.503457},
                                   {CurveSpec::polar_cosine(0.45, 11), false, 0.859029},
                                   {CurveSpec::circle(), true, 2.577}};
  for (const auto& c : cases) {
    const JordanCurve g = build_curve(c.curve);
    const BoundaryMap m(g, build_param(c.flat ? flat_knots(g.length()) : MapSpec::identity(), g.length()));
    CAPTURE(c.curve.id());
    CAPTURE(c.tau);
    const double expected = position_T(m, c.tau, 20000);
    CHECK(std::abs(t_singular(m, c.tau, kTol).value - expected) <= 2 * kTol);
    CHECK(std::abs(t_cotangent(m, c.tau, kTol).value - expected) <= 2 * kTol);
  }
}

TEST_CASE("eleven-lobed polar curve: the routes agree on a 256-point grid") {
  const BoundaryMap m = map_on(CurveSpec::polar_cosine(0.45, 11), MapSpec::identity());
  const auto s = t_profile(m, 256, kTol, Route::singular_kernel);
  const auto c = t_profile(m, 256, kTol, Route::cotangent);
  CHECK(profile_distance(s, c) <= 2 * kTol);
}
