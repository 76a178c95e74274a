#include "airsig/detect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace airsig::detect {

namespace {

img::Mask erode3x3(const img::Mask& in) {
  img::Mask out(in.width, in.height);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      if (!in.at(x, y)) continue;  // neighbourhood contains a 0 already
      std::uint8_t keep = 1;
      for (int dy = -1; dy <= 1 && keep; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (!in.in_bounds(nx, ny) || !in.at(nx, ny)) {
            keep = 0;
            break;
          }
        }
      out.at(x, y) = keep;
    }
  return out;
}

img::Mask dilate3x3(const img::Mask& in) {
  img::Mask out(in.width, in.height);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      if (in.at(x, y)) {
        out.at(x, y) = 1;
        continue;
      }
      std::uint8_t hit = 0;
      for (int dy = -1; dy <= 1 && !hit; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (in.in_bounds(nx, ny) && in.at(nx, ny)) {
            hit = 1;
            break;
          }
        }
      out.at(x, y) = hit;
    }
  return out;
}

img::Mask band_mask(const img::ImageRgb& image, const ColorBand& band) {
  img::Mask mask(image.width, image.height);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x)
      mask.at(x, y) = band.contains(image.at(x, y)) ? 1 : 0;
  return mask;
}

// Kasa algebraic fit on a point set, centred for conditioning. Returns false
// when the system is singular (degenerate point sets).
bool kasa_circle(const std::vector<std::pair<int, int>>& pts, double& cx,
                 double& cy, double& radius) {
  const std::size_t n = pts.size();
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  // Normal equations for u^2+v^2 = A u + B v + C in centred coordinates.
  double suu = 0, suv = 0, svv = 0, su = 0, sv = 0, suq = 0, svq = 0, sq = 0;
  for (const auto& [xi, yi] : pts) {
    const double u = xi - mx, v = yi - my;
    const double q = u * u + v * v;
    suu += u * u;
    suv += u * v;
    svv += v * v;
    su += u;
    sv += v;
    suq += u * q;
    svq += v * q;
    sq += q;
  }
  double m[3][4] = {{suu, suv, su, suq},
                    {suv, svv, sv, svq},
                    {su, sv, static_cast<double>(n), sq}};
  // Gauss-Jordan with partial pivoting.
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) < 1e-12) return false;
    std::swap(m[col], m[pivot]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
    }
  }
  const double a = m[0][3] / m[0][0];
  const double b = m[1][3] / m[1][1];
  const double c = m[2][3] / m[2][2];
  const double r2 = c + 0.25 * (a * a + b * b);
  if (r2 <= 0.0) return false;
  cx = mx + 0.5 * a;
  cy = my + 0.5 * b;
  radius = std::sqrt(r2);
  return true;
}

// Subpixel refinement. A rasterized disc is a hard threshold on pixel-centre
// distance, so the centre maximizing the separation margin between the
// farthest inside pixel and the nearest outside pixel decodes the subpixel
// phase far better than the algebraic fit alone, whose ~0.1 px quantization
// noise is enough to disturb triangulated depth.
void refine_separating_circle(const std::vector<std::pair<int, int>>& inner,
                              const std::vector<std::pair<int, int>>& outer,
                              double& cx, double& cy, double& radius) {
  if (inner.empty() || outer.empty()) return;
  auto margin = [&](double ex, double ey, double* rad) {
    double din = 0.0, dout = 1e300;
    for (const auto& [x, y] : inner) {
      const double d = std::hypot(x - ex, y - ey);
      if (d > din) din = d;
    }
    for (const auto& [x, y] : outer) {
      const double d = std::hypot(x - ex, y - ey);
      if (d < dout) dout = d;
    }
    if (rad) *rad = 0.5 * (din + dout);
    return dout - din;
  };

  double ex = cx, ey = cy;
  double best = margin(ex, ey, nullptr);
  double step = 0.25;
  while (step >= 1e-4) {
    double bx = ex, by = ey, bm = best;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const double m = margin(ex + dx * step, ey + dy * step, nullptr);
        if (m > bm) {
          bm = m;
          bx = ex + dx * step;
          by = ey + dy * step;
        }
      }
    if (bx == ex && by == ey) {
      step *= 0.5;
    } else {
      ex = bx;
      ey = by;
      best = bm;
    }
  }

  // All centres whose separating circle is consistent with the pixel
  // evidence form a small cell around the max-margin point; its centroid is
  // the better point estimate (the max-margin vertex sits off-centre in
  // elongated cells).
  if (best > 0.0) {
    double gx = 0.0, gy = 0.0;
    std::size_t count = 0;
    const double span = 0.6, grid = 1.0 / 32.0;
    for (double oy = -span; oy <= span; oy += grid)
      for (double ox = -span; ox <= span; ox += grid)
        if (margin(ex + ox, ey + oy, nullptr) > 0.0) {
          gx += ex + ox;
          gy += ey + oy;
          ++count;
        }
    if (count > 0) {
      ex = gx / static_cast<double>(count);
      ey = gy / static_cast<double>(count);
    }
  }

  double refined_r = radius;
  margin(ex, ey, &refined_r);
  cx = ex;
  cy = ey;
  radius = refined_r;
}

}  // namespace

img::Mask segment_color(const img::ImageRgb& image, const ColorBand& band) {
  // Opening removes speckles, closing fills pinholes.
  img::Mask mask = dilate3x3(erode3x3(band_mask(image, band)));
  return erode3x3(dilate3x3(mask));
}

stereo::BallObservation fit_largest_circle(const img::Mask& mask,
                                           const img::Mask* band_evidence) {
  const int w = mask.width, h = mask.height;
  std::vector<std::int32_t> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<std::pair<int, int>> stack, boundary, outside;

  stereo::BallObservation best = stereo::BallObservation::occluded_marker();
  std::int32_t next_label = 0;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      if (!mask.at(sx, sy) || label[static_cast<std::size_t>(sy) * w + sx] >= 0)
        continue;
      // Flood-fill one 8-connected component, collecting its boundary pixels
      // (mask pixels with an 8-neighbour outside) and the adjacent background.
      boundary.clear();
      outside.clear();
      stack.assign(1, {sx, sy});
      label[static_cast<std::size_t>(sy) * w + sx] = next_label;
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        bool on_boundary = false;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = x + dx, ny = y + dy;
            if (!mask.in_bounds(nx, ny)) {
              on_boundary = true;
              continue;
            }
            if (!mask.at(nx, ny)) {
              on_boundary = true;
              outside.emplace_back(nx, ny);
              continue;
            }
            auto& l = label[static_cast<std::size_t>(ny) * w + nx];
            if (l < 0) {
              l = next_label;
              stack.emplace_back(nx, ny);
            }
          }
        if (on_boundary) boundary.emplace_back(x, y);
      }
      ++next_label;

      if (boundary.size() < 8) continue;
      double cx, cy, radius;
      if (!kasa_circle(boundary, cx, cy, radius)) continue;
      // Boundary pixel centres sit ~half a pixel inside the true edge.
      radius += 0.5;

      if (band_evidence) {
        // Morphology shaves extremal pixels and fills concavities, which
        // corrupts the edge geometry; rebuild the constraint sets from the
        // unfiltered bandpass evidence in a ring around the algebraic fit.
        std::vector<std::pair<int, int>> ring_in, ring_out;
        const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius - 2)));
        const int x1 = std::min(w - 1, static_cast<int>(std::ceil(cx + radius + 2)));
        const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius - 2)));
        const int y1 = std::min(h - 1, static_cast<int>(std::ceil(cy + radius + 2)));
        for (int y = y0; y <= y1; ++y)
          for (int x = x0; x <= x1; ++x) {
            const double d = std::hypot(x - cx, y - cy);
            if (std::abs(d - radius) > 1.5) continue;
            (band_evidence->at(x, y) ? ring_in : ring_out).emplace_back(x, y);
          }
        refine_separating_circle(ring_in, ring_out, cx, cy, radius);
      } else {
        refine_separating_circle(boundary, outside, cx, cy, radius);
      }
      if (best.occluded() || radius > best.r) best = {cx, cy, radius};
    }
  }
  return best;
}

FrameDetection detect_frame(const img::ImageRgb& left,
                            const img::ImageRgb& right,
                            const BandPair& bands) {
  if (left.width != right.width || left.height != right.height)
    throw std::invalid_argument("detect_frame: mismatched image dimensions");

  auto run = [](const img::ImageRgb& image, const ColorBand& band) {
    const img::Mask evidence = band_mask(image, band);
    const img::Mask mask = segment_color(image, band);
    return fit_largest_circle(mask, &evidence);
  };
  FrameDetection det;
  det.green_left = run(left, bands.green);
  det.green_right = run(right, bands.green);
  det.orange_left = run(left, bands.orange);
  det.orange_right = run(right, bands.orange);

  // A ball missing in one frame is marked missing in both.
  if (det.green_left.occluded() || det.green_right.occluded()) {
    det.green_left = stereo::BallObservation::occluded_marker();
    det.green_right = stereo::BallObservation::occluded_marker();
  }
  if (det.orange_left.occluded() || det.orange_right.occluded()) {
    det.orange_left = stereo::BallObservation::occluded_marker();
    det.orange_right = stereo::BallObservation::occluded_marker();
  }
  return det;
}

traj::RawSequence detections_to_raw(const std::vector<FrameDetection>& frames,
                                    int width, int height) {
  traj::RawSequence seq;
  seq.frame_width = width;
  seq.frame_height = height;
  seq.rows.reserve(frames.size());
  const double w = width, h = height;
  auto norm3 = [&](const stereo::BallObservation& o, double* out) {
    if (o.occluded()) {
      out[0] = out[1] = out[2] = -1.0;
    } else {
      out[0] = std::clamp(o.x / w, 0.0, 1.0);
      out[1] = std::clamp(o.y / h, 0.0, 1.0);
      out[2] = std::clamp(o.r / h, 0.0, 1.0);
    }
  };
  for (const auto& f : frames) {
    std::array<double, traj::RawSequence::kColumns> row{};
    norm3(f.green_left, row.data());
    norm3(f.orange_left, row.data() + 3);
    norm3(f.green_right, row.data() + 6);
    norm3(f.orange_right, row.data() + 9);
    seq.rows.push_back(row);
  }
  return seq;
}

}  // namespace airsig::detect
