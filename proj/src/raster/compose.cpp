#include <algorithm>
#include <cmath>
#include <numbers>

#include "colier/raster/kernels.hpp"
#include "colier/raster/png_io.hpp"
#include "colier/raster/render.hpp"

namespace colier::raster {

void RasterImage::fill(std::uint8_t r, std::uint8_t g, std::uint8_t b, std::uint8_t a) {
  for (std::size_t i = 0; i < pixels.size(); i += 4) {
    pixels[i] = r;
    pixels[i + 1] = g;
    pixels[i + 2] = b;
    pixels[i + 3] = a;
  }
}

const RasterImage* MemoryAssetStore::find(const std::string& name) const {
  auto it = images_.find(name);
  return it == images_.end() ? nullptr : &it->second;
}

const RasterImage* DirectoryAssetStore::find(const std::string& name) const {
  if (auto it = cache_.find(name); it != cache_.end()) return it->second.get();
  std::unique_ptr<RasterImage> img;
  try {
    img = std::make_unique<RasterImage>(read_png(dir_ / name));
  } catch (const IoError&) {
  }
  return cache_.emplace(name, std::move(img)).first->second.get();
}

RasterImage render_layer_local(const doc::Layer& layer, int canvas_w, int canvas_h, const AssetStore& assets) {
  RasterImage img;
  if (layer.asset) {
    const RasterImage* base = assets.find(*layer.asset);
    if (!base) throw MissingAsset(layer.id);
    img = *base;
  } else {
    img = RasterImage(canvas_w, canvas_h);
  }
  for (const auto& s : layer.strokes) {
    if (!s.undone) rasterize_stroke(img, s);
  }
  for (const auto& vca : layer.pipeline) apply_vca(img, vca);
  return img;
}

namespace {

void place_translated(const RasterImage& local, int ox, int oy, RasterImage& out) {
  const int x0 = std::max(0, ox), x1 = std::min(out.width, ox + local.width);
  if (x0 >= x1) return;
  for (int y = std::max(0, oy); y < std::min(out.height, oy + local.height); ++y) {
    std::copy_n(local.at(x0 - ox, y - oy), static_cast<std::size_t>(x1 - x0) * 4, out.at(x0, y));
  }
}

// Premultiplied bilinear read; texels outside the image are transparent.
void sample_premultiplied(const RasterImage& img, double u, double v, std::uint8_t* out) {
  const double px = u - 0.5, py = v - 0.5;
  if (!(px > -1.0 && py > -1.0 && px < img.width && py < img.height)) return;
  const double fx0 = std::floor(px), fy0 = std::floor(py);
  const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
  const double fx = px - fx0, fy = py - fy0;
  double a = 0.0, rgb[3] = {0.0, 0.0, 0.0};
  const int xs[2] = {x0, x0 + 1}, ys[2] = {y0, y0 + 1};
  const double wx[2] = {1.0 - fx, fx}, wy[2] = {1.0 - fy, fy};
  for (int j = 0; j < 2; ++j) {
    if (ys[j] < 0 || ys[j] >= img.height || wy[j] == 0.0) continue;
    for (int i = 0; i < 2; ++i) {
      if (xs[i] < 0 || xs[i] >= img.width || wx[i] == 0.0) continue;
      const std::uint8_t* p = img.at(xs[i], ys[j]);
      const double w = wx[i] * wy[j] * p[3];
      a += w;
      for (int c = 0; c < 3; ++c) rgb[c] += w * p[c];
    }
  }
  if (a <= 0.0) return;
  for (int c = 0; c < 3; ++c) out[c] = to_u8(rgb[c] / a);
  out[3] = to_u8(a);
}

}  // namespace

RasterImage place_layer(const RasterImage& local, const doc::Transform2D& t, int canvas_w, int canvas_h) {
  RasterImage out(canvas_w, canvas_h);
  const double sx = doc::clamp_scale(t.scaleX), sy = doc::clamp_scale(t.scaleY);
  if (t.rotation == 0.0 && sx == 1.0 && sy == 1.0 && t.tx == std::floor(t.tx) && t.ty == std::floor(t.ty) &&
      std::abs(t.tx) < 1e9 && std::abs(t.ty) < 1e9) {
    place_translated(local, static_cast<int>(t.tx), static_cast<int>(t.ty), out);
    return out;
  }
  const double theta = t.rotation * std::numbers::pi / 180.0;
  const double c = std::cos(theta), s = std::sin(theta);
  const double cx = local.width / 2.0, cy = local.height / 2.0;
  for (int y = 0; y < canvas_h; ++y) {
    for (int x = 0; x < canvas_w; ++x) {
      const double dx = x + 0.5 - cx - t.tx, dy = y + 0.5 - cy - t.ty;
      // Undo the on-screen counter-clockwise rotation, then the scale.
      const double lx = (c * dx - s * dy) / sx, ly = (s * dx + c * dy) / sy;
      sample_premultiplied(local, cx + lx, cy + ly, out.at(x, y));
    }
  }
  return out;
}

RasterImage render_layer(const doc::Layer& layer, int canvas_w, int canvas_h, const AssetStore& assets) {
  if (!layer.visible) return RasterImage(canvas_w, canvas_h);
  return place_layer(render_layer_local(layer, canvas_w, canvas_h, assets), layer.transform, canvas_w, canvas_h);
}

void apply_opacity(RasterImage& img, double opacity) {
  for (std::size_t i = 3; i < img.pixels.size(); i += 4) img.pixels[i] = to_u8(img.pixels[i] * opacity);
}

namespace {

void composite_onto(RasterImage& dst, const RasterImage& src, double opacity) {
  if (src.width != dst.width || src.height != dst.height) throw DimensionMismatch("composite: layer size differs");
  if (!(opacity > 0.0)) return;
  active_kernels().composite_over_row(dst.pixels.data(), src.pixels.data(),
                                      static_cast<std::size_t>(dst.width) * dst.height, std::min(opacity, 1.0));
}

}  // namespace

RasterImage composite(const std::vector<LayerImage>& layers) {
  if (layers.empty()) return {};
  RasterImage out(layers.front().image->width, layers.front().image->height);
  for (const auto& l : layers) composite_onto(out, *l.image, l.opacity);
  return out;
}

RasterImage composite(const std::vector<RasterImage>& layers) {
  std::vector<LayerImage> refs;
  refs.reserve(layers.size());
  for (const auto& img : layers) refs.push_back({&img, 1.0});
  return composite(refs);
}

RasterImage render_document(const doc::SessionDocument& doc, const AssetStore& assets) {
  const int w = doc.meta.width, h = doc.meta.height;
  RasterImage out(w, h);
  for (const auto& layer : doc.layers) {
    if (!layer.visible || layer.opacity <= 0.0) continue;
    composite_onto(out, render_layer(layer, w, h, assets), layer.opacity);
  }
  return out;
}

void export_image(const RasterImage& img, const std::filesystem::path& path) { write_png(img, path); }

}  // namespace colier::raster
