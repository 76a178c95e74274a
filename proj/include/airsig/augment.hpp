#pragma once

#include <vector>

#include "airsig/trajectory.hpp"

namespace airsig::augment {

enum class ScalePlane { xz, yz };

// The 5 x (2 planes x 3 factors) = 30 member grid. Factor-1 members appear
// in both planes, so each pure rotation occurs twice.
struct AugmentGrid {
  std::vector<double> angles_deg{-10.0, -5.0, 0.0, 5.0, 10.0};
  std::vector<double> scale_factors{0.95, 1.0, 1.05};

  std::size_t size() const { return angles_deg.size() * 2 * scale_factors.size(); }
};

// Rotates every point (tip and tail channels alike) about the Z-parallel
// axis through the tip-channel centroid. angle 0 returns a bitwise copy.
traj::InterpolatedTrajectory rotate_traj(const traj::InterpolatedTrajectory& t,
                                         double angle_deg);

// Scales the two named coordinates about the tip-channel centroid, leaving
// the third unchanged. factor 1 returns a bitwise copy; factor <= 0 throws.
traj::InterpolatedTrajectory scale_traj(const traj::InterpolatedTrajectory& t,
                                        double factor, ScalePlane plane);

// Full grid, rotation first then scaling; ordered angles-major, then plane,
// then factor.
std::vector<traj::InterpolatedTrajectory> augment_30(
    const traj::InterpolatedTrajectory& t, const AugmentGrid& grid = {});

}  // namespace airsig::augment
