#include "airsig/stereo.hpp"

#include <cmath>
#include <stdexcept>

#include "airsig/errors.hpp"

namespace airsig::stereo {

double norm(Point3 p) { return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z); }

double distance(Point3 a, Point3 b) { return norm(a - b); }

BallObservation project_point(const CameraRig& rig, Point3 p,
                              double ball_radius, Camera camera) {
  if (p.z <= 0.0)
    throw std::domain_error("project_point: point not in front of camera");

  const double b = camera == Camera::left ? 0.0 : rig.baseline;
  const double x = rig.focal_length * (p.x - b) / p.z + rig.cx;
  const double y = rig.focal_length * p.y / p.z + rig.cy;
  const double r = rig.focal_length * ball_radius / p.z;

  // Circle entirely off-frame counts as not observed.
  if (x + r < 0.0 || x - r > rig.image_width || y + r < 0.0 ||
      y - r > rig.image_height)
    return BallObservation::occluded_marker();

  return {x, y, r};
}

Point3 triangulate(const CameraRig& rig, const BallObservation& left,
                   const BallObservation& right, double disparity_epsilon) {
  if (left.occluded() || right.occluded())
    throw OcclusionError("triangulate: occluded observation");

  // Disparity is taken left-minus-right (positive on a standard rig) so Z
  // comes out positive; right-minus-left is the same geometry up to sign.
  const double d = left.x - right.x;
  if (std::abs(d) <= disparity_epsilon)
    throw DegenerateDepthError("triangulate: disparity below epsilon");

  const double z = rig.focal_length * rig.baseline / d;
  const double x = (left.x - rig.cx) * z / rig.focal_length;
  const double y = (left.y - rig.cy) * z / rig.focal_length;
  return {x, y, z};
}

}  // namespace airsig::stereo
