#include "airsig/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "airsig/errors.hpp"
#include "airsig/spline.hpp"

namespace airsig::traj {

namespace {

void append_value(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  out += buf;
}

double parse_double(const std::string& field, std::size_t row) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ParseError("non-numeric cell '" + field + "'", row);
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t pos = text.find('\n', start);
    if (pos == std::string::npos) pos = text.size();
    std::string line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = pos + 1;
  }
  return lines;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

std::string raw_header_line() {
  std::string h;
  for (std::size_t c = 0; c < RawSequence::kColumns; ++c) {
    if (c) h += ',';
    h += kRawHeader[c];
  }
  return h;
}

bool is_occluded_triple(const double* t) {
  return t[0] == -1.0 && t[1] == -1.0 && t[2] == -1.0;
}

}  // namespace

std::string encode_raw_csv(const RawSequence& seq) {
  std::string out = raw_header_line();
  out += '\n';
  for (const auto& row : seq.rows) {
    for (std::size_t c = 0; c < RawSequence::kColumns; ++c) {
      if (c) out += ',';
      append_value(out, row[c]);
    }
    out += '\n';
  }
  return out;
}

RawSequence decode_raw_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != raw_header_line())
    throw ParseError("missing or malformed raw-sequence header", 1);

  RawSequence seq;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() && i + 1 == lines.size()) break;
    const std::size_t row_no = i + 1;
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != RawSequence::kColumns)
      throw ParseError("expected 12 columns, got " +
                           std::to_string(fields.size()),
                       row_no);
    std::array<double, RawSequence::kColumns> row{};
    for (std::size_t c = 0; c < RawSequence::kColumns; ++c)
      row[c] = parse_double(fields[c], row_no);
    for (std::size_t t = 0; t < RawSequence::kColumns; t += 3) {
      const double* triple = row.data() + t;
      if (is_occluded_triple(triple)) continue;
      for (int k = 0; k < 3; ++k)
        if (triple[k] < 0.0 || triple[k] > 1.0)
          throw ParseError("non-occluded value out of [0,1] range", row_no);
    }
    seq.rows.push_back(row);
  }
  return seq;
}

void write_raw_csv(const std::string& path, const RawSequence& seq) {
  write_file(path, encode_raw_csv(seq));
}

RawSequence read_raw_csv(const std::string& path) {
  return decode_raw_csv(read_file(path));
}

std::string encode_tiptail_csv(const Mat& points) {
  if (points.cols != 6 && points.cols != 3)
    throw std::invalid_argument("tip-tail CSV takes 6 or 3 columns");
  std::string out =
      points.cols == 6 ? std::string("Xr,Yr,Zr,Xg,Yg,Zg") : std::string("Xr,Yr,Zr");
  out += '\n';
  for (std::size_t r = 0; r < points.rows; ++r) {
    for (std::size_t c = 0; c < points.cols; ++c) {
      if (c) out += ',';
      append_value(out, points.at(r, c));
    }
    out += '\n';
  }
  return out;
}

Mat decode_tiptail_csv(const std::string& text) {
  const auto lines = split_lines(text);
  std::size_t cols = 0;
  if (!lines.empty() && lines[0] == "Xr,Yr,Zr,Xg,Yg,Zg")
    cols = 6;
  else if (!lines.empty() && lines[0] == "Xr,Yr,Zr")
    cols = 3;
  else
    throw ParseError("missing or malformed tip-tail header", 1);

  std::vector<double> values;
  std::size_t rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() && i + 1 == lines.size()) break;
    const std::size_t row_no = i + 1;
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != cols)
      throw ParseError("expected " + std::to_string(cols) + " columns, got " +
                           std::to_string(fields.size()),
                       row_no);
    for (const auto& f : fields) values.push_back(parse_double(f, row_no));
    ++rows;
  }
  Mat m(rows, cols);
  m.v = std::move(values);
  return m;
}

void write_tiptail_csv(const std::string& path, const Mat& points) {
  write_file(path, encode_tiptail_csv(points));
}

Mat read_tiptail_csv(const std::string& path) {
  return decode_tiptail_csv(read_file(path));
}

TipTailTrajectory derive_tip_tail(const RawSequence& seq,
                                  const stereo::CameraRig& rig,
                                  DeriveStats* stats) {
  const double w = rig.image_width;
  const double h = rig.image_height;
  DeriveStats local;
  std::vector<double> out;
  for (const auto& row : seq.rows) {
    // green: cols 0-2 (left), 6-8 (right); orange: 3-5 (left), 9-11 (right)
    const bool green_occ =
        is_occluded_triple(row.data()) || is_occluded_triple(row.data() + 6);
    const bool orange_occ =
        is_occluded_triple(row.data() + 3) || is_occluded_triple(row.data() + 9);
    if (green_occ || orange_occ) {
      ++local.occluded_dropped;
      continue;
    }
    const stereo::BallObservation green_l{row[0] * w, row[1] * h, row[2] * h};
    const stereo::BallObservation green_r{row[6] * w, row[7] * h, row[8] * h};
    const stereo::BallObservation orange_l{row[3] * w, row[4] * h, row[5] * h};
    const stereo::BallObservation orange_r{row[9] * w, row[10] * h, row[11] * h};
    try {
      const stereo::Point3 tip = stereo::triangulate(rig, orange_l, orange_r);
      const stereo::Point3 tail = stereo::triangulate(rig, green_l, green_r);
      out.insert(out.end(), {tip.x, tip.y, tip.z, tail.x, tail.y, tail.z});
    } catch (const DegenerateDepthError&) {
      ++local.degenerate_dropped;
    }
  }
  if (stats) *stats = local;
  TipTailTrajectory traj;
  traj.points.rows = out.size() / 6;
  traj.points.cols = 6;
  traj.points.v = std::move(out);
  return traj;
}

InterpolatedTrajectory bspline_resample(const Mat& points, std::size_t t) {
  if (points.rows < 4)
    throw InsufficientDataError("bspline_resample needs at least 4 rows");
  if (t < 2) throw std::invalid_argument("bspline_resample: t must be >= 2");

  InterpolatedTrajectory out;
  out.points = Mat(t, points.cols);
  std::vector<double> channel(points.rows);
  for (std::size_t c = 0; c < points.cols; ++c) {
    for (std::size_t r = 0; r < points.rows; ++r)
      channel[r] = points.at(r, c);
    const spline::CubicSpline s(channel);
    for (std::size_t k = 0; k < t; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(t - 1);
      out.points.at(k, c) = s(u);
    }
  }
  return out;
}

img::ImageGray render_trace_image(const RawSequence& seq, int size) {
  // Orange-left observations carry the 2D trace.
  std::vector<double> xs, ys;
  for (const auto& row : seq.rows) {
    if (is_occluded_triple(row.data() + 3)) continue;
    double x = row[3];
    double y = row[4];
    if (seq.frame_width > 0 && seq.frame_height > 0) {
      x *= seq.frame_width;
      y *= seq.frame_height;
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  if (xs.empty()) throw EmptyTraceError("render_trace_image: no valid points");

  constexpr std::size_t kTracePoints = 1024;
  if (xs.size() >= 4) {
    const spline::CubicSpline sx(xs), sy(ys);
    std::vector<double> rx(kTracePoints), ry(kTracePoints);
    for (std::size_t k = 0; k < kTracePoints; ++k) {
      const double u = static_cast<double>(k) / (kTracePoints - 1);
      rx[k] = sx(u);
      ry[k] = sy(u);
    }
    xs = std::move(rx);
    ys = std::move(ry);
  }

  const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
  const double xmid = 0.5 * (*xmin_it + *xmax_it);
  const double ymid = 0.5 * (*ymin_it + *ymax_it);
  const double extent = std::max(*xmax_it - *xmin_it, *ymax_it - *ymin_it);
  const double scale = extent > 0.0 ? 0.8 * size / extent : 0.0;

  img::ImageGray image(size, size, 255);
  const double centre = 0.5 * size;
  const int dot_r = 2;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const int px = static_cast<int>(std::lround(centre + (xs[k] - xmid) * scale));
    const int py = static_cast<int>(std::lround(centre + (ys[k] - ymid) * scale));
    for (int dy = -dot_r; dy <= dot_r; ++dy)
      for (int dx = -dot_r; dx <= dot_r; ++dx) {
        if (dx * dx + dy * dy > dot_r * dot_r) continue;
        const int x = px + dx, y = py + dy;
        if (x >= 0 && x < size && y >= 0 && y < size) image.at(x, y) = 0;
      }
  }
  return image;
}

}  // namespace airsig::traj
