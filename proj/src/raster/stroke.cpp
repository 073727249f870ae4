#include <algorithm>
#include <cmath>

#include "colier/raster/render.hpp"

namespace colier::raster {
namespace {

// Bounds chord count for absurd control points; coordinates are finite but
// may be astronomically far apart.
constexpr double kMaxQuadSegments = 4096;

int quad_segments(Point p0, Point p1, Point p2, double tolerance) {
  const double ax = p0.x - 2 * p1.x + p2.x;
  const double ay = p0.y - 2 * p1.y + p2.y;
  // Chord error over a parameter step h is |a| h^2 / 4.
  const double n = std::ceil(std::sqrt(std::hypot(ax, ay) / (4.0 * tolerance)));
  if (!(n >= 1.0)) return 1;
  return static_cast<int>(std::min(n, kMaxQuadSegments));
}

using Subpaths = std::vector<std::vector<Point>>;

Subpaths flatten_subpaths(const std::vector<doc::PathCommand>& path, double tolerance) {
  if (!(tolerance > 0.0)) throw InvalidValue("tolerance");
  if (auto bad = doc::validate_path(path); !bad.empty()) throw InvalidValue(bad);
  Subpaths out;
  Point cur;
  for (const auto& cmd : path) {
    const auto& c = cmd.coords;
    switch (cmd.verb) {
      case doc::PathVerb::MoveTo:
        cur = {c[0], c[1]};
        out.push_back({cur});
        break;
      case doc::PathVerb::LineTo:
        cur = {c[0], c[1]};
        out.back().push_back(cur);
        break;
      case doc::PathVerb::QuadTo: {
        const Point p0 = cur, p1{c[0], c[1]}, p2{c[2], c[3]};
        const int n = quad_segments(p0, p1, p2, tolerance);
        for (int k = 1; k < n; ++k) {
          const double t = static_cast<double>(k) / n;
          const double u = 1.0 - t;
          out.back().push_back({u * u * p0.x + 2 * u * t * p1.x + t * t * p2.x,
                                u * u * p0.y + 2 * u * t * p1.y + t * t * p2.y});
        }
        out.back().push_back(p2);
        cur = p2;
        break;
      }
    }
  }
  return out;
}

double dist2_to_segment(double px, double py, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - a.x) * dx + (py - a.y) * dy) / len2, 0.0, 1.0);
  const double ex = a.x + t * dx - px, ey = a.y + t * dy - py;
  return ex * ex + ey * ey;
}

// Inclusive pixel index range whose centers fall inside [lo, hi].
bool pixel_span(double lo, double hi, int size, int& first, int& last) {
  const double f = std::ceil(lo - 0.5), l = std::floor(hi - 0.5);
  if (!(f <= l) || l < 0.0 || f > size - 1) return false;
  first = static_cast<int>(std::max(f, 0.0));
  last = static_cast<int>(std::min(l, static_cast<double>(size - 1)));
  return true;
}

void paint_segment(RasterImage& img, Point a, Point b, double r, const doc::Color& color) {
  int x0, x1, y0, y1;
  if (!pixel_span(std::min(a.x, b.x) - r, std::max(a.x, b.x) + r, img.width, x0, x1)) return;
  if (!pixel_span(std::min(a.y, b.y) - r, std::max(a.y, b.y) + r, img.height, y0, y1)) return;
  const double r2 = r * r;
  for (int y = y0; y <= y1; ++y) {
    std::uint8_t* px = img.at(x0, y);
    for (int x = x0; x <= x1; ++x, px += 4) {
      if (dist2_to_segment(x + 0.5, y + 0.5, a, b) <= r2) {
        px[0] = color.r;
        px[1] = color.g;
        px[2] = color.b;
        px[3] = 255;
      }
    }
  }
}

}  // namespace

std::vector<Point> flatten_path(const std::vector<doc::PathCommand>& path, double tolerance) {
  std::vector<Point> out;
  for (auto& sub : flatten_subpaths(path, tolerance)) out.insert(out.end(), sub.begin(), sub.end());
  return out;
}

void rasterize_stroke(RasterImage& target, const doc::Stroke& stroke) {
  if (target.empty() || !(stroke.width > 0.0)) return;
  const double r = stroke.width / 2.0;
  for (const auto& sub : flatten_subpaths(stroke.path, kFlattenTolerance)) {
    if (sub.size() == 1) paint_segment(target, sub[0], sub[0], r, stroke.color);
    for (std::size_t i = 1; i < sub.size(); ++i) paint_segment(target, sub[i - 1], sub[i], r, stroke.color);
  }
}

}  // namespace colier::raster
