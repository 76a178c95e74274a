#include "airsig/spline.hpp"

#include <algorithm>
#include <cmath>

#include "airsig/errors.hpp"

namespace airsig::spline {

// Solves for the second derivatives M of the interpolating cubic spline on a
// uniform grid. Interior rows are the classic tridiagonal continuity
// equations; not-a-knot couples the two end rows to their neighbours, so the
// end rows are folded into the adjacent ones before the Thomas sweep.
CubicSpline::CubicSpline(const std::vector<double>& values) : y_(values) {
  const std::size_t n = y_.size();
  if (n < 4)
    throw InsufficientDataError("cubic spline needs at least 4 samples");
  h_ = 1.0 / static_cast<double>(n - 1);

  // Tridiagonal coefficients for rows 1..n-2:
  //   (h/6) M[i-1] + (2h/3) M[i] + (h/6) M[i+1] = (y[i+1]-2y[i]+y[i-1])/h
  // Not-a-knot: M[0]-2M[1]+M[2] = 0 and M[n-3]-2M[n-2]+M[n-1] = 0.
  std::vector<double> lower(n, h_ / 6.0), diag(n, 2.0 * h_ / 3.0),
      upper(n, h_ / 6.0), rhs(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i)
    rhs[i] = (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / h_;

  // Substitute M[0] = 2M[1] - M[2] into row 1, M[n-1] = 2M[n-2] - M[n-3]
  // into row n-2; the system over M[1..n-2] is then strictly tridiagonal.
  diag[1] += 2.0 * lower[1];
  upper[1] -= lower[1];
  diag[n - 2] += 2.0 * upper[n - 2];
  lower[n - 2] -= upper[n - 2];

  // Thomas sweep over indices 1..n-2.
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  m_.assign(n, 0.0);
  m_[n - 2] = rhs[n - 2] / diag[n - 2];
  for (std::size_t i = n - 3; i >= 1; --i) {
    m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
    if (i == 1) break;
  }
  m_[0] = 2.0 * m_[1] - m_[2];
  m_[n - 1] = 2.0 * m_[n - 2] - m_[n - 3];
}

double CubicSpline::operator()(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  const std::size_t n = y_.size();
  const double pos = u * static_cast<double>(n - 1);
  std::size_t i = std::min(static_cast<std::size_t>(pos), n - 2);
  const double s = pos - static_cast<double>(i);
  const double a = 1.0 - s;
  const double h2_6 = h_ * h_ / 6.0;
  return a * y_[i] + s * y_[i + 1] +
         h2_6 * ((a * a * a - a) * m_[i] + (s * s * s - s) * m_[i + 1]);
}

}  // namespace airsig::spline
