#include "airsig/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "airsig/errors.hpp"

namespace airsig::img {

ImageRgb::ImageRgb(int w, int h, Rgb fill)
    : width(w), height(h), pixels(3 * static_cast<std::size_t>(w) * h) {
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill[0];
    pixels[i + 1] = fill[1];
    pixels[i + 2] = fill[2];
  }
}

std::size_t Mask::count() const {
  return std::accumulate(pixels.begin(), pixels.end(), std::size_t{0});
}

void fill_disc(ImageRgb& image, double cx, double cy, double r, Rgb color) {
  if (r <= 0.0) return;
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
  const int x1 = std::min(image.width - 1, static_cast<int>(std::ceil(cx + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
  const int y1 = std::min(image.height - 1, static_cast<int>(std::ceil(cy + r)));
  const double r2 = r * r;
  for (int y = y0; y <= y1; ++y) {
    const double dy = y - cy;
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - cx;
      if (dx * dx + dy * dy <= r2) {
        auto* p = image.at(x, y);
        p[0] = color[0];
        p[1] = color[1];
        p[2] = color[2];
      }
    }
  }
}

namespace {

void skip_pnm_whitespace(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_pnm_int(std::istream& in) {
  skip_pnm_whitespace(in);
  int v = -1;
  in >> v;
  return v;
}

}  // namespace

void write_ppm(const std::string& path, const ImageRgb& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw IoError("write failed: " + path);
}

ImageRgb read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw ParseError("not a binary PPM: " + path);
  const int w = read_pnm_int(in);
  const int h = read_pnm_int(in);
  const int maxval = read_pnm_int(in);
  if (w <= 0 || h <= 0 || maxval != 255)
    throw ParseError("unsupported PPM header: " + path);
  in.get();  // single whitespace after maxval
  ImageRgb image(w, h);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(image.pixels.size()));
  if (!in) throw ParseError("truncated PPM: " + path);
  return image;
}

void write_pgm(const std::string& path, const ImageGray& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw IoError("write failed: " + path);
}

ImageGray read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw ParseError("not a binary PGM: " + path);
  const int w = read_pnm_int(in);
  const int h = read_pnm_int(in);
  const int maxval = read_pnm_int(in);
  if (w <= 0 || h <= 0 || maxval != 255)
    throw ParseError("unsupported PGM header: " + path);
  in.get();
  ImageGray image(w, h);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(image.pixels.size()));
  if (!in) throw ParseError("truncated PGM: " + path);
  return image;
}

}  // namespace airsig::img
