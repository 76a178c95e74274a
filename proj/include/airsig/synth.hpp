#pragma once

#include <cstdint>
#include <vector>

#include "airsig/image.hpp"
#include "airsig/stereo.hpp"
#include "airsig/trajectory.hpp"

namespace airsig::synth {

// Per-signer pen orientation dynamics: the tail wobbles around a mean tilt
// direction at a characteristic frequency and amplitude.
struct OrientationStyle {
  stereo::Point3 mean_tilt{0.0, -1.0, 0.0};  // unit vector
  double wobble_frequency = 1.0;             // Hz
  double wobble_amplitude = 0.2;             // rad, in [0, pi/4]
};

// Deterministic parametric signer: a control polygon for the tip path plus
// an orientation style. Stands in for a human signer.
struct SignerModel {
  int signer_id = 0;
  std::vector<stereo::Point3> tip_control_points;  // 8..16, inside the volume
  OrientationStyle orientation_style;
  double duration = 3.0;  // s, in [2, 5]
  std::uint64_t seed = 0;
};

struct PenSample {
  stereo::Point3 tip;
  stereo::Point3 tail;
  double timestamp = 0.0;  // s
  bool tail_visible = true;
};

struct SynthParams {
  double pen_length = 0.18;          // m, |tail - tip|
  double frame_rate = 80.0;          // Hz (capture envelope 60..100)
  double sigma_intra = 0.004;        // m, genuine control-point jitter
  double sigma_forge = 0.008;        // m, forgery control-point jitter
  double occlusion_fraction = 0.05;  // fraction of frames with hidden tail
  double ball_radius = 0.04;         // m, both balls
  // Writing volume: extents (m) centred on volume_centre.
  stereo::Point3 volume_centre{0.0, 0.0, 2.0};
  stereo::Point3 volume_extent{0.30, 0.20, 0.10};
};

// Deterministic in (signer_id, seed).
SignerModel make_signer(int signer_id, std::uint64_t seed,
                        const SynthParams& params = {});

// One genuine signature: jittered control polygon, smooth +/-10% time warp,
// wobbling pen orientation, contiguous tail occlusion segments.
std::vector<PenSample> sample_genuine(const SignerModel& model,
                                      std::uint64_t variation_seed,
                                      const SynthParams& params = {});

// Skilled forgery: the target's tip shape (with forger-level jitter) carried
// by the forger's orientation style. Throws std::invalid_argument when
// target and forger are the same signer.
std::vector<PenSample> sample_forgery(const SignerModel& target,
                                      const SignerModel& forger,
                                      std::uint64_t seed,
                                      const SynthParams& params = {});

struct RenderOptions {
  img::Rgb background{128, 128, 128};
  img::Rgb orange{220, 100, 40};
  img::Rgb green{40, 200, 60};
  double noise_amplitude = 0.0;  // uniform per-channel noise, 0..255 scale
  std::uint64_t noise_seed = 0;
};

struct StereoFramePair {
  img::ImageRgb left;
  img::ImageRgb right;
};

// Rasterizes each sample into a stereo pair: green tail disc under the
// orange tip disc, on a neutral background, no anti-aliasing.
std::vector<StereoFramePair> render_stereo_frames(
    const stereo::CameraRig& rig, const std::vector<PenSample>& samples,
    const SynthParams& params = {}, const RenderOptions& options = {});

// Exact tip-tail ground truth, mirroring the pipeline's occlusion drop rule
// (tail-invisible frames removed). This bypasses render + detect entirely.
traj::TipTailTrajectory tip_tail_from_samples(
    const std::vector<PenSample>& samples);

}  // namespace airsig::synth
