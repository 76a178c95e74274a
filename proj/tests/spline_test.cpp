#include "airsig/spline.hpp"

#include <cmath>
#include <vector>

#include "airsig/errors.hpp"
#include "doctest.h"

using airsig::spline::CubicSpline;

TEST_CASE("spline: interpolates the knots exactly") {
  const std::vector<double> y = {0.3, -1.2, 2.5, 0.0, 4.1, -0.7};
  const CubicSpline s(y);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double u = static_cast<double>(i) / (y.size() - 1);
    CHECK(s(u) == doctest::Approx(y[i]).epsilon(1e-12));
  }
}

TEST_CASE("spline: reproduces linear data") {
  std::vector<double> y(9);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 2.0 - 0.75 * i;
  const CubicSpline s(y);
  for (double u = 0.0; u <= 1.0; u += 0.01)
    CHECK(s(u) == doctest::Approx(2.0 - 0.75 * 8.0 * u).epsilon(1e-12));
}

TEST_CASE("spline: reproduces a cubic polynomial (not-a-knot exactness)") {
  std::vector<double> y(7);
  auto f = [](double u) { return 1.0 + u - 2.0 * u * u + 3.0 * u * u * u; };
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = f(static_cast<double>(i) / (y.size() - 1));
  const CubicSpline s(y);
  for (double u = 0.0; u <= 1.0; u += 0.013)
    CHECK(s(u) == doctest::Approx(f(u)).epsilon(1e-10));
}

TEST_CASE("spline: fewer than 4 samples is an error") {
  CHECK_THROWS_AS(CubicSpline({1.0, 2.0, 3.0}), airsig::InsufficientDataError);
}

TEST_CASE("spline: n=4 works (single cubic through 4 points)") {
  const std::vector<double> y = {0.0, 1.0, -1.0, 0.5};
  const CubicSpline s(y);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(s(i / 3.0) == doctest::Approx(y[i]).epsilon(1e-12));
}
