#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "airsig/image.hpp"
#include "airsig/stereo.hpp"

namespace airsig::traj {

// Dense row-major matrix of doubles; rows are time steps.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
  double* row(std::size_t r) { return v.data() + r * cols; }
  const double* row(std::size_t r) const { return v.data() + r * cols; }
  bool operator==(const Mat&) const = default;
};

// Raw per-frame stereo observations, normalized to [0,1] (x by frame width,
// y and r by frame height). Column order:
//   xgl ygl rgl  xrl yrl rrl  xgr ygr rgr  xrr yrr rrr
// (g = green tail, r = orange tip; l/r = left/right frame). Occluded balls
// carry the (-1,-1,-1) sentinel. Frame dimensions are carried for
// denormalization; they are not part of the CSV payload.
struct RawSequence {
  static constexpr std::size_t kColumns = 12;
  std::vector<std::array<double, kColumns>> rows;
  int frame_width = 0;
  int frame_height = 0;
};

inline constexpr std::array<const char*, RawSequence::kColumns> kRawHeader = {
    "xgl", "ygl", "rgl", "xrl", "yrl", "rrl",
    "xgr", "ygr", "rgr", "xrr", "yrr", "rrr"};

// Metric tip/tail centres in the left-camera frame, one row per kept frame.
// Columns: Xr Yr Zr (orange tip) then Xg Yg Zg (green tail), metres.
struct TipTailTrajectory {
  Mat points;  // n x 6
};

// Fixed-length spline-resampled trajectory; t x 6, or t x 3 for tip-only
// data. This is what the network consumes.
struct InterpolatedTrajectory {
  Mat points;
};

inline constexpr std::size_t kDefaultSplineLength = 512;

// --- Raw sequence CSV codec -------------------------------------------------
// One header row, values with 9 significant digits; decode(encode(s)) is
// byte-stable under re-encoding. Decode validates the 12-column shape, the
// all-or-nothing occlusion sentinel, and the [0,1] range of live values.
std::string encode_raw_csv(const RawSequence& seq);
RawSequence decode_raw_csv(const std::string& text);

void write_raw_csv(const std::string& path, const RawSequence& seq);
RawSequence read_raw_csv(const std::string& path);

// --- Tip-tail / interpolated CSV --------------------------------------------
// 6-column header "Xr,Yr,Zr,Xg,Yg,Zg" (or 3-column "Xr,Yr,Zr"), metres.
std::string encode_tiptail_csv(const Mat& points);
Mat decode_tiptail_csv(const std::string& text);
void write_tiptail_csv(const std::string& path, const Mat& points);
Mat read_tiptail_csv(const std::string& path);

// --- Transforms ---------------------------------------------------------------
struct DeriveStats {
  std::size_t occluded_dropped = 0;    // green (or orange) sentinel rows
  std::size_t degenerate_dropped = 0;  // disparity below epsilon
};

// Denormalizes, drops occluded rows, triangulates both balls. Degenerate
// disparity rows are dropped and counted, like occlusions.
TipTailTrajectory derive_tip_tail(const RawSequence& seq,
                                  const stereo::CameraRig& rig,
                                  DeriveStats* stats = nullptr);

// Fits an interpolating cubic spline per column over the normalized row
// index and evaluates it at t uniformly spaced parameter values.
// Requires at least 4 rows.
InterpolatedTrajectory bspline_resample(const Mat& points, std::size_t t);
inline InterpolatedTrajectory bspline_resample(const TipTailTrajectory& traj,
                                               std::size_t t) {
  return bspline_resample(traj.points, t);
}

// Renders the orange-left 2D trace as dots on a white square raster,
// scale-normalized to fit with a 10% margin.
img::ImageGray render_trace_image(const RawSequence& seq, int size = 224);

}  // namespace airsig::traj
