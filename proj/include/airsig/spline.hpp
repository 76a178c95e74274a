#pragma once

#include <cstddef>
#include <vector>

namespace airsig::spline {

// Cubic polynomial spline interpolating n >= 4 samples placed at uniform
// parameter values u_i = i/(n-1) on [0, 1], with not-a-knot end conditions.
// Interpolation is exact at the knots; linear data is reproduced exactly.
class CubicSpline {
 public:
  // Throws InsufficientDataError when values.size() < 4.
  explicit CubicSpline(const std::vector<double>& values);

  // Evaluates at u, clamped to [0, 1].
  double operator()(double u) const;

  std::size_t size() const { return y_.size(); }

 private:
  std::vector<double> y_;  // knot values
  std::vector<double> m_;  // second derivatives at knots
  double h_ = 0.0;         // uniform knot spacing, 1/(n-1)
};

}  // namespace airsig::spline
