#include <doctest.h>

#include <cmath>

#include "hybridem/quadrature.hpp"

using namespace hybridem;

TEST_CASE("triangle rules integrate monomials exactly") {
  // reference area and the x*y moment have known closed forms
  const TriangleRule r2 = gauss_triangle(2);
  double area = 0.0, xy = 0.0;
  for (int q = 0; q < r2.size(); ++q) {
    area += r2.weights[q];
    xy += r2.weights[q] * r2.bary(q, 1) * r2.bary(q, 2);
  }
  CHECK(area == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(xy == doctest::Approx(1.0 / 24.0).epsilon(1e-13));

  for (int d = 0; d <= 20; ++d) {
    const TriangleRule rule = gauss_triangle(d);
    CHECK(rule.exact_degree >= d);
    CHECK(rule.weights.minCoeff() > 0.0);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        double val = 0.0;
        for (int q = 0; q < rule.size(); ++q)
          val += rule.weights[q] * std::pow(rule.bary(q, 1), a) * std::pow(rule.bary(q, 2), b);
        const double exact = monomial_integral(a, b);
        CHECK(std::abs(val - exact) <= 1e-13 * std::abs(exact));
      }
  }
}

TEST_CASE("degree-12 rule handles x^6 y^6") {
  const TriangleRule rule = gauss_triangle(12);
  double val = 0.0;
  for (int q = 0; q < rule.size(); ++q)
    val += rule.weights[q] * std::pow(rule.bary(q, 1), 6) * std::pow(rule.bary(q, 2), 6);
  const double exact = monomial_integral(6, 6);
  CHECK(std::abs(val - exact) <= 1e-13 * std::abs(exact));
}

TEST_CASE("interval rules") {
  for (int d = 0; d <= 20; ++d) {
    const IntervalRule rule = gauss_interval(d);
    CHECK(rule.exact_degree >= d);
    for (int p = 0; p <= d; ++p) {
      double val = 0.0;
      for (int i = 0; i < rule.size(); ++i)
        val += rule.weights[i] * std::pow(rule.points[i], p);
      CHECK(std::abs(val - 1.0 / (p + 1)) <= 1e-14);
    }
  }
}

TEST_CASE("unsupported degrees are rejected") {
  CHECK_THROWS_AS(gauss_triangle(-1), std::invalid_argument);
  CHECK_THROWS_AS(gauss_triangle(21), std::invalid_argument);
}
