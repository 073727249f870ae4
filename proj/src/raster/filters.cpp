#include <array>
#include <cmath>

#include "colier/document/effects.hpp"
#include "colier/raster/kernels.hpp"
#include "colier/raster/render.hpp"

namespace colier::raster {
namespace {

double checked_param(const doc::VcaInstance& vca, std::string_view name) {
  for (const auto& [key, value] : vca.params) {
    const doc::ParamSpec* spec = doc::find_param(vca.effect, key);
    if (!spec || !doc::param_in_range(*spec, value)) throw InvalidValue("params." + key);
  }
  return vca.param(name);
}

void contrast(RasterImage& img, double k) {
  std::array<std::uint8_t, 256> lut;
  for (int c = 0; c < 256; ++c) {
    const double v = std::clamp((c / 255.0 - 0.5) * k + 0.5, 0.0, 1.0);
    lut[c] = static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
  }
  for (std::size_t i = 0; i < img.pixels.size(); i += 4) {
    for (int c = 0; c < 3; ++c) img.pixels[i + c] = lut[img.pixels[i + c]];
  }
}

void pixelate(RasterImage& img, int b) {
  for (int by = 0; by < img.height; by += b) {
    const int ye = std::min(by + b, img.height);
    for (int bx = 0; bx < img.width; bx += b) {
      const int xe = std::min(bx + b, img.width);
      std::uint64_t sum[3] = {0, 0, 0};
      for (int y = by; y < ye; ++y) {
        for (int x = bx; x < xe; ++x) {
          const std::uint8_t* p = img.at(x, y);
          for (int c = 0; c < 3; ++c) sum[c] += p[c];
        }
      }
      const std::uint64_t count = static_cast<std::uint64_t>(ye - by) * (xe - bx);
      std::uint8_t mean[3];
      for (int c = 0; c < 3; ++c) mean[c] = static_cast<std::uint8_t>((2 * sum[c] + count) / (2 * count));
      for (int y = by; y < ye; ++y) {
        for (int x = bx; x < xe; ++x) {
          std::uint8_t* p = img.at(x, y);
          for (int c = 0; c < 3; ++c) p[c] = mean[c];
        }
      }
    }
  }
}

double smoothstep(double a, double b, double x) {
  const double t = std::clamp((x - a) / (b - a), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

void vignette(RasterImage& img, double s) {
  const auto& k = active_kernels();
  std::vector<double> factor(img.width);
  for (int y = 0; y < img.height; ++y) {
    const double dy = (y + 0.5) / img.height - 0.5;
    for (int x = 0; x < img.width; ++x) {
      const double dx = (x + 0.5) / img.width - 0.5;
      // Edge midpoints sit at r = 1, corners at sqrt(2).
      const double r = 2.0 * std::sqrt(dx * dx + dy * dy);
      factor[x] = 1.0 - s * smoothstep(0.5, 1.0, r);
    }
    k.scale_rgb_row(img.row(y), factor.data(), img.width);
  }
}

/// Bilinear, clamp-to-edge read of one channel at continuous position (u, v),
/// where pixel (i, j) has its center at (i + 0.5, j + 0.5).
std::uint8_t sample_channel(const RasterImage& img, int c, double u, double v) {
  const double px = std::clamp(u - 0.5, 0.0, img.width - 1.0);
  const double py = std::clamp(v - 0.5, 0.0, img.height - 1.0);
  const int x0 = static_cast<int>(px), y0 = static_cast<int>(py);
  const int x1 = std::min(x0 + 1, img.width - 1), y1 = std::min(y0 + 1, img.height - 1);
  const double fx = px - x0, fy = py - y0;
  const double top = (1.0 - fx) * img.at(x0, y0)[c] + fx * img.at(x1, y0)[c];
  const double bottom = (1.0 - fx) * img.at(x0, y1)[c] + fx * img.at(x1, y1)[c];
  return to_u8((1.0 - fy) * top + fy * bottom);
}

void chromatic_aberration(RasterImage& img, double o) {
  const RasterImage src = img;
  const double shift = o * img.width;
  for (int y = 0; y < img.height; ++y) {
    const double v = y + 0.5;
    for (int x = 0; x < img.width; ++x) {
      const double u = x + 0.5;
      std::uint8_t* p = img.at(x, y);
      p[0] = sample_channel(src, 0, u + shift, v);
      p[2] = sample_channel(src, 2, u - shift, v);
    }
  }
}

void chroma_zoom(RasterImage& img, double z) {
  const RasterImage src = img;
  const double cx = img.width / 2.0, cy = img.height / 2.0;
  const double red = 1.0 - z, blue = 1.0 + z;  // 1 + z*w for w = -1, +1
  for (int y = 0; y < img.height; ++y) {
    const double dy = y + 0.5 - cy;
    for (int x = 0; x < img.width; ++x) {
      const double dx = x + 0.5 - cx;
      std::uint8_t* p = img.at(x, y);
      p[0] = sample_channel(src, 0, cx + dx / red, cy + dy / red);
      p[2] = sample_channel(src, 2, cx + dx / blue, cy + dy / blue);
    }
  }
}

}  // namespace

void apply_vca(RasterImage& img, const doc::VcaInstance& vca) {
  if (!vca.enabled) return;
  switch (vca.effect) {
    case doc::Effect::Contrast: {
      const double k = checked_param(vca, "amount");
      if (!img.empty()) contrast(img, k);
      break;
    }
    case doc::Effect::Pixelation: {
      const double b = checked_param(vca, "blockSize");
      if (!img.empty()) pixelate(img, static_cast<int>(b));
      break;
    }
    case doc::Effect::Vignette: {
      const double s = checked_param(vca, "strength");
      if (!img.empty()) vignette(img, s);
      break;
    }
    case doc::Effect::ChromaticAberration: {
      const double o = checked_param(vca, "offset");
      if (!img.empty()) chromatic_aberration(img, o);
      break;
    }
    case doc::Effect::ChromaZoom: {
      const double z = checked_param(vca, "zoom");
      if (!img.empty()) chroma_zoom(img, z);
      break;
    }
  }
}

}  // namespace colier::raster
