#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "hmcert/quadrature.hpp"

using namespace hmcert;

TEST_CASE("gk15 integrates polynomials of degree 22 exactly") {
  auto p = [](double x) { return std::pow(x, 22) - 3.0 * x * x + 1.0; };
  const double exact = 2.0 / 23.0 - 2.0 + 2.0;
  const auto r = quad::gk15(p, -1.0, 1.0);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("gauss_legendre10 weights sum to the interval length") {
  CHECK(quad::gauss_legendre10([](double) { return 1.0; }, 0.0, 3.0) == doctest::Approx(3.0).epsilon(1e-15));
  // Degree 19 is the highest the rule integrates exactly.
  const double v = quad::gauss_legendre10([](double x) { return std::pow(x, 19) + std::pow(x, 18); }, 0.0, 1.0);
  CHECK(v == doctest::Approx(1.0 / 20.0 + 1.0 / 19.0).epsilon(1e-14));
}

TEST_CASE("adaptive handles an integrable endpoint singularity") {
  const auto r = quad::adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 2.0) < 1e-8);
}

TEST_CASE("adaptive reports failure instead of looping") {
  const auto r = quad::adaptive([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-12, 0.0, 50);
  CHECK_FALSE(r.converged);
}

TEST_CASE("adaptive_pieces sums the pieces") {
  const std::vector<double> breaks = {0.0, 0.5, 1.0, std::numbers::pi};
  const auto r = quad::adaptive_pieces([](double x) { return std::sin(x); }, breaks, 1e-12);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("neville extrapolation recovers a polynomial's value at zero") {
  const std::vector<double> xs = {0.1, 0.2, 0.3, 0.4};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(2.0 - x + 3.0 * x * x - x * x * x);
  const auto e = quad::neville_extrapolate(xs, ys);
  CHECK(e.value == doctest::Approx(2.0).epsilon(1e-12));
  // The estimate is the gap to the next lower order: x0 x1 x2 for this cubic.
  CHECK(e.error == doctest::Approx(0.1 * 0.2 * 0.3).epsilon(1e-9));

  std::vector<double> quad_ys;
  for (double x : xs) quad_ys.push_back(1.0 + x - 2.0 * x * x);
  const auto q = quad::neville_extrapolate(xs, quad_ys);
  CHECK(q.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.error < 1e-12);
}
