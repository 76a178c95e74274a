#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace airsig::img {

using Rgb = std::array<std::uint8_t, 3>;

// Row-major 8-bit RGB raster.
struct ImageRgb {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height

  ImageRgb() = default;
  ImageRgb(int w, int h, Rgb fill = {0, 0, 0});

  std::uint8_t* at(int x, int y) { return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
  const std::uint8_t* at(int x, int y) const { return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

// Binary mask, one byte per pixel (0 or 1).
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Mask() = default;
  Mask(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  std::size_t count() const;
  bool operator==(const Mask&) const = default;
};

// 8-bit grayscale raster (255 = white background).
struct ImageGray {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  ImageGray() = default;
  ImageGray(int w, int h, std::uint8_t fill = 255)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const ImageGray&) const = default;
};

// Fills the disc (x-cx)^2 + (y-cy)^2 <= r^2, sampling at integer pixel
// centres, clipped to the image.
void fill_disc(ImageRgb& image, double cx, double cy, double r, Rgb color);

// Binary PPM (P6) / PGM (P5).
void write_ppm(const std::string& path, const ImageRgb& image);
ImageRgb read_ppm(const std::string& path);
void write_pgm(const std::string& path, const ImageGray& image);
ImageGray read_pgm(const std::string& path);

}  // namespace airsig::img
