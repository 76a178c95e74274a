#pragma once

#include <cstddef>

namespace airsig::stereo {

// Rectified pinhole stereo rig. Both cameras share intrinsics; the right
// camera sits `baseline` metres along +X of the left camera.
struct CameraRig {
  double focal_length = 350.0;   // px
  double cx = 336.0;             // px
  double cy = 188.0;             // px
  double baseline = 0.12;        // m
  int image_width = 672;         // px
  int image_height = 376;        // px

  bool valid() const {
    return focal_length > 0.0 && baseline > 0.0 && cx > 0.0 &&
           cx < image_width && cy > 0.0 && cy < image_height &&
           image_width > 0 && image_height > 0;
  }
};

// Fitted circle in one camera frame, pixel units. The occluded sentinel is
// all three fields equal to -1.
struct BallObservation {
  double x = -1.0;
  double y = -1.0;
  double r = -1.0;

  bool occluded() const { return x == -1.0 && y == -1.0 && r == -1.0; }
  static BallObservation occluded_marker() { return {-1.0, -1.0, -1.0}; }
};

// Metric point in the left-camera frame, Z positive away from the camera.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Point3 operator*(double s, Point3 p) { return {s * p.x, s * p.y, s * p.z}; }

double norm(Point3 p);
double distance(Point3 a, Point3 b);

enum class Camera { left, right };

// Disparities at or below this are treated as unresolvable depth.
inline constexpr double kDisparityEpsilon = 0.5;  // px

// Projects a ball centre of physical radius `ball_radius` into one camera.
// Returns the occluded marker when the projected circle lies entirely
// outside the image. Throws std::domain_error for points behind the camera.
BallObservation project_point(const CameraRig& rig, Point3 p,
                              double ball_radius, Camera camera);

// Recovers the metric point from a rectified pair of observations using the
// left-frame pixel coordinates. Throws OcclusionError / DegenerateDepthError.
Point3 triangulate(const CameraRig& rig, const BallObservation& left,
                   const BallObservation& right,
                   double disparity_epsilon = kDisparityEpsilon);

}  // namespace airsig::stereo
