#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "colier/document/types.hpp"
#include "colier/raster/image.hpp"

namespace colier::raster {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

inline constexpr double kFlattenTolerance = 0.25;

/// Polyline through the path; quadratics are split into enough chords that
/// none strays more than `tolerance` from the curve. Throws InvalidValue on
/// a malformed path.
std::vector<Point> flatten_path(const std::vector<doc::PathCommand>& path, double tolerance = kFlattenTolerance);

/// Pixels whose center lies within width/2 of the polyline are painted with
/// the opaque stroke color. Geometry outside the image is clipped.
void rasterize_stroke(RasterImage& target, const doc::Stroke& stroke);

/// Applies one filter in place. Disabled instances do nothing. Throws
/// InvalidValue for parameters outside their range.
void apply_vca(RasterImage& img, const doc::VcaInstance& vca);

class AssetStore {
 public:
  virtual ~AssetStore() = default;
  virtual const RasterImage* find(const std::string& name) const = 0;
};

class MemoryAssetStore : public AssetStore {
 public:
  void put(std::string name, RasterImage img) { images_[std::move(name)] = std::move(img); }
  const RasterImage* find(const std::string& name) const override;

 private:
  std::map<std::string, RasterImage> images_;
};

/// Loads PNG files from a directory on first use. Unreadable files count as
/// missing.
class DirectoryAssetStore : public AssetStore {
 public:
  explicit DirectoryAssetStore(std::filesystem::path dir) : dir_(std::move(dir)) {}
  const RasterImage* find(const std::string& name) const override;

 private:
  std::filesystem::path dir_;
  mutable std::map<std::string, std::unique_ptr<RasterImage>> cache_;
};

/// Layer content in its own pixel space: asset (or transparent canvas-sized
/// base), live strokes in order, then enabled filters in pipeline order.
RasterImage render_layer_local(const doc::Layer& layer, int canvas_w, int canvas_h, const AssetStore& assets);

/// Maps layer-space content into canvas space through the layer transform
/// with bilinear sampling. Opacity is not applied.
RasterImage place_layer(const RasterImage& local, const doc::Transform2D& t, int canvas_w, int canvas_h);

/// Canvas-sized layer image, opacity not yet applied. Invisible layers come
/// back fully transparent. Throws MissingAsset.
RasterImage render_layer(const doc::Layer& layer, int canvas_w, int canvas_h, const AssetStore& assets);

/// Bakes an opacity into the alpha channel.
void apply_opacity(RasterImage& img, double opacity);

struct LayerImage {
  const RasterImage* image = nullptr;
  double opacity = 1.0;
};

/// Source-over, index 0 at the bottom, onto a transparent canvas. Opacity
/// scales source alpha before blending. Throws DimensionMismatch.
RasterImage composite(const std::vector<LayerImage>& layers);
RasterImage composite(const std::vector<RasterImage>& layers);

RasterImage render_document(const doc::SessionDocument& doc, const AssetStore& assets);

void export_image(const RasterImage& img, const std::filesystem::path& path);

}  // namespace colier::raster
