#include "airsig/augment.hpp"

#include <cmath>
#include <stdexcept>

namespace airsig::augment {

namespace {

constexpr double kDegToRad = 0.017453292519943295;

// Centroid of the tip channel (first 3 columns).
void tip_centroid(const traj::Mat& m, double& cx, double& cy, double& cz) {
  cx = cy = cz = 0.0;
  for (std::size_t r = 0; r < m.rows; ++r) {
    cx += m.at(r, 0);
    cy += m.at(r, 1);
    cz += m.at(r, 2);
  }
  const double n = static_cast<double>(m.rows);
  cx /= n;
  cy /= n;
  cz /= n;
}

}  // namespace

traj::InterpolatedTrajectory rotate_traj(const traj::InterpolatedTrajectory& t,
                                         double angle_deg) {
  if (angle_deg == 0.0) return t;
  const traj::Mat& in = t.points;
  double cx, cy, cz;
  tip_centroid(in, cx, cy, cz);
  const double co = std::cos(angle_deg * kDegToRad);
  const double si = std::sin(angle_deg * kDegToRad);

  traj::InterpolatedTrajectory out = t;
  for (std::size_t r = 0; r < in.rows; ++r)
    for (std::size_t base = 0; base + 3 <= in.cols; base += 3) {
      const double x = in.at(r, base) - cx;
      const double y = in.at(r, base + 1) - cy;
      out.points.at(r, base) = cx + x * co - y * si;
      out.points.at(r, base + 1) = cy + x * si + y * co;
      // Z is the rotation axis direction; unchanged.
    }
  return out;
}

traj::InterpolatedTrajectory scale_traj(const traj::InterpolatedTrajectory& t,
                                        double factor, ScalePlane plane) {
  if (factor <= 0.0)
    throw std::invalid_argument("scale_traj: factor must be positive");
  if (factor == 1.0) return t;
  const traj::Mat& in = t.points;
  double cx, cy, cz;
  tip_centroid(in, cx, cy, cz);

  traj::InterpolatedTrajectory out = t;
  for (std::size_t r = 0; r < in.rows; ++r)
    for (std::size_t base = 0; base + 3 <= in.cols; base += 3) {
      if (plane == ScalePlane::xz) {
        out.points.at(r, base) = cx + factor * (in.at(r, base) - cx);
      } else {
        out.points.at(r, base + 1) = cy + factor * (in.at(r, base + 1) - cy);
      }
      out.points.at(r, base + 2) = cz + factor * (in.at(r, base + 2) - cz);
    }
  return out;
}

std::vector<traj::InterpolatedTrajectory> augment_30(
    const traj::InterpolatedTrajectory& t, const AugmentGrid& grid) {
  std::vector<traj::InterpolatedTrajectory> out;
  out.reserve(grid.size());
  for (const double angle : grid.angles_deg) {
    const traj::InterpolatedTrajectory rotated = rotate_traj(t, angle);
    for (const ScalePlane plane : {ScalePlane::xz, ScalePlane::yz})
      for (const double factor : grid.scale_factors)
        out.push_back(scale_traj(rotated, factor, plane));
  }
  return out;
}

}  // namespace airsig::augment
