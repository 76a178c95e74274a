#include "airsig/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "airsig/stereo.hpp"
#include "doctest.h"

using namespace airsig;
using namespace airsig::synth;

namespace {

// Test oracle: piecewise-linear resampling to a fixed length, independent of
// the production spline code.
std::vector<stereo::Point3> linear_resample(
    const std::vector<stereo::Point3>& path, std::size_t count) {
  std::vector<stereo::Point3> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double pos =
        static_cast<double>(k) * (path.size() - 1) / (count - 1);
    const std::size_t i = std::min(static_cast<std::size_t>(pos),
                                   path.size() - 2);
    const double s = pos - i;
    out[k] = path[i] + s * (path[i + 1] - path[i]);
  }
  return out;
}

std::vector<stereo::Point3> tip_path(const std::vector<PenSample>& samples) {
  std::vector<stereo::Point3> out;
  for (const auto& s : samples) out.push_back(s.tip);
  return out;
}

double mean_path_distance(const std::vector<PenSample>& a,
                          const std::vector<PenSample>& b) {
  const auto ra = linear_resample(tip_path(a), 512);
  const auto rb = linear_resample(tip_path(b), 512);
  double sum = 0.0;
  for (std::size_t k = 0; k < 512; ++k) sum += stereo::distance(ra[k], rb[k]);
  return sum / 512.0;
}

stereo::Point3 tail_direction(const PenSample& s) {
  const stereo::Point3 d = s.tail - s.tip;
  const double n = stereo::norm(d);
  return {d.x / n, d.y / n, d.z / n};
}

double mean_tail_angle(const std::vector<PenSample>& a,
                       const std::vector<PenSample>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto da = tail_direction(a[k]);
    const auto db = tail_direction(b[k]);
    const double dot = da.x * db.x + da.y * db.y + da.z * db.z;
    sum += std::acos(std::min(1.0, std::max(-1.0, dot)));
  }
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("make_signer: deterministic in (signer_id, seed)") {
  const SignerModel a = make_signer(0, 42);
  const SignerModel b = make_signer(0, 42);
  REQUIRE(a.tip_control_points.size() == b.tip_control_points.size());
  for (std::size_t i = 0; i < a.tip_control_points.size(); ++i)
    CHECK(stereo::distance(a.tip_control_points[i], b.tip_control_points[i]) ==
          0.0);
  CHECK(a.duration == b.duration);
  CHECK(a.orientation_style.wobble_frequency ==
        b.orientation_style.wobble_frequency);
}

TEST_CASE("make_signer: model invariants hold") {
  for (int id = 0; id < 20; ++id) {
    const SignerModel m = make_signer(id, 7);
    CHECK(m.tip_control_points.size() >= 8);
    CHECK(m.tip_control_points.size() <= 16);
    for (const auto& p : m.tip_control_points) CHECK(p.z > 0.0);
    CHECK(m.duration >= 2.0);
    CHECK(m.duration <= 5.0);
    CHECK(m.orientation_style.wobble_amplitude >= 0.0);
    CHECK(m.orientation_style.wobble_amplitude <= 3.14159265 / 4.0);
    CHECK(stereo::norm(m.orientation_style.mean_tilt) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("make_signer: different signers differ") {
  const SignerModel a = make_signer(0, 42);
  const SignerModel b = make_signer(1, 42);
  double total = 0.0;
  const std::size_t n = std::min(a.tip_control_points.size(),
                                 b.tip_control_points.size());
  for (std::size_t i = 0; i < n; ++i)
    total += stereo::distance(a.tip_control_points[i], b.tip_control_points[i]);
  CHECK(total / n > 0.0);
}

TEST_CASE("sample_genuine: deterministic under the variation seed") {
  const SignerModel m = make_signer(3, 11);
  const auto a = sample_genuine(m, 5);
  const auto b = sample_genuine(m, 5);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(stereo::distance(a[i].tip, b[i].tip) == 0.0);
    CHECK(stereo::distance(a[i].tail, b[i].tail) == 0.0);
    CHECK(a[i].tail_visible == b[i].tail_visible);
  }
}

TEST_CASE("sample_genuine: pen rigidity |tail - tip| = pen_length") {
  const SynthParams params;
  const SignerModel m = make_signer(1, 9);
  for (std::uint64_t v = 0; v < 3; ++v) {
    for (const auto& s : sample_genuine(m, v, params))
      CHECK(std::abs(stereo::distance(s.tail, s.tip) - params.pen_length) <
            1e-12);
  }
}

TEST_CASE("sample_genuine: occlusion fraction is near the configured value") {
  const SignerModel m = make_signer(2, 13);
  std::size_t occluded = 0, total = 0;
  for (std::uint64_t v = 0; v < 20; ++v) {
    const auto samples = sample_genuine(m, v);
    for (const auto& s : samples) {
      total += 1;
      occluded += s.tail_visible ? 0 : 1;
    }
  }
  const double fraction = static_cast<double>(occluded) / total;
  CHECK(fraction > 0.01);
  CHECK(fraction < 0.12);
}

TEST_CASE("synth separability: intra-signer < inter-signer tip distance") {
  constexpr int kSigners = 10;
  constexpr int kDraws = 5;
  std::vector<std::vector<std::vector<PenSample>>> draws(kSigners);
  for (int s = 0; s < kSigners; ++s) {
    const SignerModel m = make_signer(s, 2024);
    for (int v = 0; v < kDraws; ++v)
      draws[s].push_back(sample_genuine(m, v));
  }

  double intra = 0.0, inter = 0.0;
  std::size_t intra_n = 0, inter_n = 0;
  for (int s = 0; s < kSigners; ++s)
    for (int v = 0; v < kDraws; ++v)
      for (int w = v + 1; w < kDraws; ++w) {
        intra += mean_path_distance(draws[s][v], draws[s][w]);
        ++intra_n;
      }
  for (int s = 0; s < kSigners; ++s)
    for (int r = s + 1; r < kSigners; ++r) {
      inter += mean_path_distance(draws[s][0], draws[r][0]);
      ++inter_n;
    }
  intra /= intra_n;
  inter /= inter_n;
  CHECK(intra < inter);       // separability margin strictly positive
  CHECK(inter > 2.0 * intra);  // comfortably separable at desk scale
}

TEST_CASE("sample_forgery: tip is close to the target, tail style is not") {
  const SignerModel target = make_signer(0, 77);
  const SignerModel forger = make_signer(5, 77);

  const auto genuine_a = sample_genuine(target, 0);
  const auto genuine_b = sample_genuine(target, 1);
  const auto forged = sample_forgery(target, forger, 0);

  // Tip shape: forgery tracks the target far better than another signer.
  const SignerModel other = make_signer(7, 77);
  const auto other_draw = sample_genuine(other, 0);
  const double d_forge = mean_path_distance(forged, genuine_a);
  const double d_other = mean_path_distance(other_draw, genuine_a);
  CHECK(d_forge < d_other);

  // Tail dynamics: forgery misses the target's orientation style by more
  // than genuine repetition noise.
  const double intra_angle = mean_tail_angle(genuine_a, genuine_b);
  const double forge_angle = mean_tail_angle(genuine_a, forged);
  CHECK(forge_angle > intra_angle);
}

TEST_CASE("sample_forgery: deterministic and rejects self-forgery") {
  const SignerModel target = make_signer(0, 4);
  const SignerModel forger = make_signer(1, 4);
  const auto a = sample_forgery(target, forger, 9);
  const auto b = sample_forgery(target, forger, 9);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(stereo::distance(a[i].tail, b[i].tail) == 0.0);
  CHECK_THROWS_AS(sample_forgery(target, target, 0), std::invalid_argument);
}

TEST_CASE("render_stereo_frames: single on-axis tip draws one orange disc") {
  const stereo::CameraRig rig;
  std::vector<PenSample> samples(1);
  samples[0].tip = {0.0, 0.0, 2.0};
  samples[0].tail = {0.0, -0.18, 2.0};
  samples[0].tail_visible = false;

  SynthParams params;
  params.ball_radius = 0.02;  // projects to r = 350*0.02/2 = 3.5 px
  const RenderOptions options;
  const auto frames = render_stereo_frames(rig, samples, params, options);
  REQUIRE(frames.size() == 1);
  const img::ImageRgb& left = frames[0].left;

  // centre pixel is orange, pixels 5 px away are background
  const auto* centre = left.at(336, 188);
  CHECK(centre[0] == options.orange[0]);
  CHECK(centre[1] == options.orange[1]);
  const auto* outside = left.at(336 + 5, 188);
  CHECK(outside[0] == options.background[0]);

  // disc of radius 3.5 px: area within [pi*2.5^2, pi*4.5^2]
  std::size_t orange_px = 0, green_px = 0;
  for (std::size_t i = 0; i < left.pixels.size(); i += 3) {
    if (left.pixels[i] == options.orange[0] &&
        left.pixels[i + 1] == options.orange[1])
      ++orange_px;
    if (left.pixels[i] == options.green[0] &&
        left.pixels[i + 1] == options.green[1])
      ++green_px;
  }
  CHECK(orange_px >= 20);
  CHECK(orange_px <= 64);
  CHECK(green_px == 0);  // tail invisible -> no green pixels
}

TEST_CASE("tip_tail_from_samples drops invisible-tail rows") {
  std::vector<PenSample> samples(4);
  for (auto& s : samples) {
    s.tip = {0.0, 0.0, 2.0};
    s.tail = {0.0, -0.18, 2.0};
    s.tail_visible = true;
  }
  samples[2].tail_visible = false;
  const auto traj = tip_tail_from_samples(samples);
  CHECK(traj.points.rows == 3);
  CHECK(traj.points.cols == 6);
}
