#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace colier::raster {

/// Row-major, non-premultiplied 8-bit RGBA.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RasterImage() = default;
  RasterImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 4, 0) {}

  std::uint8_t* at(int x, int y) { return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 4; }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 4;
  }
  std::uint8_t* row(int y) { return at(0, y); }
  const std::uint8_t* row(int y) const { return at(0, y); }

  bool empty() const { return width == 0 || height == 0; }
  void fill(std::uint8_t r, std::uint8_t g, std::uint8_t b, std::uint8_t a);
  bool operator==(const RasterImage&) const = default;
};

struct MissingAsset : std::runtime_error {
  explicit MissingAsset(std::string layer)
      : std::runtime_error("missing asset for layer " + layer), layer_id(std::move(layer)) {}
  std::string layer_id;
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidValue : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Round half up to an 8-bit channel; the input is clamped to [0, 255].
inline std::uint8_t to_u8(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(static_cast<int>(v + 0.5));
}

}  // namespace colier::raster
