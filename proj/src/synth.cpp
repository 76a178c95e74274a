#include "airsig/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "airsig/errors.hpp"
#include "airsig/rng.hpp"
#include "airsig/spline.hpp"

namespace airsig::synth {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

stereo::Point3 normalized(stereo::Point3 v) {
  const double n = stereo::norm(v);
  return {v.x / n, v.y / n, v.z / n};
}

stereo::Point3 cross(stereo::Point3 a, stereo::Point3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Orthonormal pair spanning the plane perpendicular to the (unit) tilt axis.
void tilt_frame(stereo::Point3 tilt, stereo::Point3& e1, stereo::Point3& e2) {
  const stereo::Point3 aux =
      std::abs(tilt.x) < 0.9 ? stereo::Point3{1, 0, 0} : stereo::Point3{0, 1, 0};
  e1 = normalized(cross(tilt, aux));
  e2 = cross(tilt, e1);
}

struct TrajectoryDraw {
  std::vector<stereo::Point3> control_points;  // jittered polygon
  double warp = 0.0;                           // +/-10% rate modulation
  double duration_scale = 1.0;
  double phase1 = 0.0, phase2 = 0.0;           // wobble phases
  std::vector<std::pair<std::size_t, std::size_t>> occlusion;  // [start, end)
};

TrajectoryDraw draw_variation(const SignerModel& model, double jitter_sigma,
                              std::size_t frame_count_hint,
                              const SynthParams& params, Rng& rng) {
  TrajectoryDraw d;
  d.control_points = model.tip_control_points;
  for (auto& p : d.control_points) {
    p.x += rng.normal(0.0, jitter_sigma);
    p.y += rng.normal(0.0, jitter_sigma);
    p.z += rng.normal(0.0, jitter_sigma);
  }
  d.warp = rng.uniform(-0.1, 0.1);
  d.duration_scale = rng.uniform(0.9, 1.1);
  d.phase1 = rng.uniform(0.0, kTwoPi);
  d.phase2 = rng.uniform(0.0, kTwoPi);

  // Contiguous occlusion segments totalling ~occlusion_fraction of frames.
  const std::size_t n = frame_count_hint;
  const std::size_t total = static_cast<std::size_t>(
      std::lround(params.occlusion_fraction * static_cast<double>(n)));
  if (total > 0) {
    const std::size_t segments = 1 + rng.uniform_index(2);
    std::size_t remaining = total;
    std::size_t region_start = 0;
    for (std::size_t s = 0; s < segments && remaining > 0; ++s) {
      const std::size_t len =
          s + 1 == segments ? remaining : 1 + rng.uniform_index(remaining);
      const std::size_t region_end = n * (s + 1) / segments;
      if (region_start + len >= region_end) continue;
      const std::size_t start =
          region_start + rng.uniform_index(region_end - region_start - len);
      d.occlusion.emplace_back(start, start + len);
      remaining -= len;
      region_start = region_end;
    }
  }
  return d;
}

std::vector<PenSample> realize(const TrajectoryDraw& draw,
                               const OrientationStyle& style, double duration,
                               const SynthParams& params) {
  const double total_time = duration * draw.duration_scale;
  const std::size_t n = std::max<std::size_t>(
      4, static_cast<std::size_t>(std::lround(total_time * params.frame_rate)));

  std::vector<double> cx(draw.control_points.size()),
      cy(draw.control_points.size()), cz(draw.control_points.size());
  for (std::size_t i = 0; i < draw.control_points.size(); ++i) {
    cx[i] = draw.control_points[i].x;
    cy[i] = draw.control_points[i].y;
    cz[i] = draw.control_points[i].z;
  }
  const spline::CubicSpline sx(cx), sy(cy), sz(cz);

  stereo::Point3 e1, e2;
  tilt_frame(style.mean_tilt, e1, e2);

  std::vector<PenSample> samples(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double tau = static_cast<double>(k) / static_cast<double>(n - 1);
    // Monotone reparameterization with rate in [0.9, 1.1].
    const double u = tau + (draw.warp / kTwoPi) * std::sin(kTwoPi * tau);
    PenSample& s = samples[k];
    s.tip = {sx(u), sy(u), sz(u)};
    s.timestamp = static_cast<double>(k) / params.frame_rate;

    const double a = style.wobble_amplitude *
                     std::sin(kTwoPi * style.wobble_frequency * s.timestamp +
                              draw.phase1);
    const double b = style.wobble_amplitude *
                     std::sin(kTwoPi * 0.73 * style.wobble_frequency *
                                  s.timestamp +
                              draw.phase2);
    const stereo::Point3 dir = normalized(
        style.mean_tilt + a * e1 + b * e2);
    s.tail = s.tip + params.pen_length * dir;
    s.tail_visible = true;
  }
  for (const auto& [start, end] : draw.occlusion)
    for (std::size_t k = start; k < end && k < n; ++k)
      samples[k].tail_visible = false;
  return samples;
}

}  // namespace

SignerModel make_signer(int signer_id, std::uint64_t seed,
                        const SynthParams& params) {
  Rng rng = Rng::from(seed, static_cast<std::uint64_t>(signer_id),
                      0x5349474eULL);  // "SIGN"
  SignerModel model;
  model.signer_id = signer_id;
  model.seed = seed;

  const std::size_t n_points = 8 + rng.uniform_index(9);  // 8..16
  model.tip_control_points.resize(n_points);
  const auto c = params.volume_centre;
  const auto e = params.volume_extent;
  for (std::size_t i = 0; i < n_points; ++i) {
    // Sweep across the writing volume like handwriting, with free Y/Z.
    const double sweep =
        (static_cast<double>(i) / static_cast<double>(n_points - 1) - 0.5);
    model.tip_control_points[i] = {
        c.x + 0.9 * e.x * sweep + rng.uniform(-0.05, 0.05) * e.x,
        c.y + rng.uniform(-0.5, 0.5) * e.y,
        c.z + rng.uniform(-0.5, 0.5) * e.z};
  }

  model.orientation_style.mean_tilt = normalized(
      {rng.uniform(-0.35, 0.35), rng.uniform(-1.0, -0.6), rng.uniform(-0.35, 0.35)});
  model.orientation_style.wobble_frequency = rng.uniform(0.5, 2.0);
  model.orientation_style.wobble_amplitude = rng.uniform(0.05, 0.35);
  model.duration = rng.uniform(2.0, 5.0);
  return model;
}

std::vector<PenSample> sample_genuine(const SignerModel& model,
                                      std::uint64_t variation_seed,
                                      const SynthParams& params) {
  Rng rng = Rng::from(model.seed ^ 0x47454e55ULL,  // "GENU"
                      static_cast<std::uint64_t>(model.signer_id),
                      variation_seed);
  const std::size_t hint = static_cast<std::size_t>(
      std::lround(model.duration * params.frame_rate));
  const TrajectoryDraw draw =
      draw_variation(model, params.sigma_intra, hint, params, rng);
  return realize(draw, model.orientation_style, model.duration, params);
}

std::vector<PenSample> sample_forgery(const SignerModel& target,
                                      const SignerModel& forger,
                                      std::uint64_t seed,
                                      const SynthParams& params) {
  if (target.signer_id == forger.signer_id)
    throw std::invalid_argument("sample_forgery: target == forger");
  Rng rng = Rng::from(target.seed ^ 0x464f5247ULL,  // "FORG"
                      (static_cast<std::uint64_t>(target.signer_id) << 32) |
                          static_cast<std::uint32_t>(forger.signer_id),
                      seed);
  const std::size_t hint = static_cast<std::size_t>(
      std::lround(target.duration * params.frame_rate));
  // Tip shape is copied from the target; the orientation style cannot be.
  const TrajectoryDraw draw =
      draw_variation(target, params.sigma_forge, hint, params, rng);
  return realize(draw, forger.orientation_style, target.duration, params);
}

std::vector<StereoFramePair> render_stereo_frames(
    const stereo::CameraRig& rig, const std::vector<PenSample>& samples,
    const SynthParams& params, const RenderOptions& options) {
  Rng noise_rng(options.noise_seed);
  std::vector<StereoFramePair> frames;
  frames.reserve(samples.size());
  for (const auto& s : samples) {
    StereoFramePair pair{
        img::ImageRgb(rig.image_width, rig.image_height, options.background),
        img::ImageRgb(rig.image_width, rig.image_height, options.background)};
    img::ImageRgb* images[2] = {&pair.left, &pair.right};
    const stereo::Camera cams[2] = {stereo::Camera::left, stereo::Camera::right};
    for (int i = 0; i < 2; ++i) {
      // Tail first so an overlapping tip occludes it, not the reverse.
      if (s.tail_visible) {
        const auto obs =
            stereo::project_point(rig, s.tail, params.ball_radius, cams[i]);
        if (!obs.occluded())
          img::fill_disc(*images[i], obs.x, obs.y, obs.r, options.green);
      }
      const auto obs =
          stereo::project_point(rig, s.tip, params.ball_radius, cams[i]);
      if (!obs.occluded())
        img::fill_disc(*images[i], obs.x, obs.y, obs.r, options.orange);

      if (options.noise_amplitude > 0.0) {
        for (auto& byte : images[i]->pixels) {
          const double v =
              byte + noise_rng.uniform(-options.noise_amplitude,
                                       options.noise_amplitude);
          byte = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
      }
    }
    frames.push_back(std::move(pair));
  }
  return frames;
}

traj::TipTailTrajectory tip_tail_from_samples(
    const std::vector<PenSample>& samples) {
  std::vector<double> out;
  for (const auto& s : samples) {
    if (!s.tail_visible) continue;
    out.insert(out.end(),
               {s.tip.x, s.tip.y, s.tip.z, s.tail.x, s.tail.y, s.tail.z});
  }
  traj::TipTailTrajectory traj;
  traj.points.rows = out.size() / 6;
  traj.points.cols = 6;
  traj.points.v = std::move(out);
  return traj;
}

}  // namespace airsig::synth
