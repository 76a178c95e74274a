#pragma once

#include <cstdint>
#include <vector>

#include "airsig/image.hpp"
#include "airsig/stereo.hpp"
#include "airsig/trajectory.hpp"

namespace airsig::detect {

// Inclusive per-channel RGB thresholds.
struct ColorBand {
  std::uint8_t r_lo = 0, r_hi = 255;
  std::uint8_t g_lo = 0, g_hi = 255;
  std::uint8_t b_lo = 0, b_hi = 255;

  bool contains(const std::uint8_t* px) const {
    return px[0] >= r_lo && px[0] <= r_hi && px[1] >= g_lo && px[1] <= g_hi &&
           px[2] >= b_lo && px[2] <= b_hi;
  }
};

struct BandPair {
  ColorBand orange{180, 255, 40, 160, 0, 90};
  ColorBand green{0, 100, 150, 255, 0, 120};
};

// Both balls in both frames; occluded balls carry the (-1,-1,-1) sentinel,
// mirrored across frames (a ball missing in one frame is marked missing in
// both).
struct FrameDetection {
  stereo::BallObservation green_left;
  stereo::BallObservation orange_left;
  stereo::BallObservation green_right;
  stereo::BallObservation orange_right;
};

// Bandpass mask followed by one 3x3 opening then one 3x3 closing.
img::Mask segment_color(const img::ImageRgb& image, const ColorBand& band);

// Extracts 8-connected components, fits an algebraic least-squares circle to
// each component's boundary (components with fewer than 8 boundary pixels
// are skipped), sharpens the winning fit to subpixel accuracy against the
// mask, and returns the fit with the largest radius, or the occluded
// sentinel when nothing qualifies. `band_evidence`, when given, is the
// pre-morphology bandpass mask; it keeps morphology artifacts out of the
// subpixel constraints.
stereo::BallObservation fit_largest_circle(
    const img::Mask& mask, const img::Mask* band_evidence = nullptr);

// Full per-frame chain for both colors. Throws std::invalid_argument when
// the images' dimensions differ.
FrameDetection detect_frame(const img::ImageRgb& left,
                            const img::ImageRgb& right,
                            const BandPair& bands = {});

// Normalizes per-frame detections into a raw sequence (x by width, y and r
// by height, sentinels preserved).
traj::RawSequence detections_to_raw(const std::vector<FrameDetection>& frames,
                                    int width, int height);

}  // namespace airsig::detect
