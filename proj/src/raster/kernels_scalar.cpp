#include <cmath>

#include "colier/raster/kernels.hpp"
#include "kernels_internal.hpp"

namespace colier::raster::detail {

void composite_over_row_scalar(std::uint8_t* dst, const std::uint8_t* src, std::size_t n, double opacity) {
  for (std::size_t i = 0; i < n; ++i, dst += 4, src += 4) {
    const double sa = (src[3] * opacity) / 255.0;
    if (sa == 0.0) continue;
    const double da = dst[3] / 255.0;
    const double k = da * (1.0 - sa);
    const double oa = sa + k;
    for (int c = 0; c < 3; ++c) {
      const double v = (src[c] * sa + dst[c] * k) / oa;
      dst[c] = static_cast<std::uint8_t>(std::floor(v + 0.5));
    }
    dst[3] = static_cast<std::uint8_t>(std::floor(oa * 255.0 + 0.5));
  }
}

void scale_rgb_row_scalar(std::uint8_t* px, const double* factor, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i, px += 4) {
    const double f = factor[i];
    for (int c = 0; c < 3; ++c) px[c] = static_cast<std::uint8_t>(std::floor(px[c] * f + 0.5));
  }
}

}  // namespace colier::raster::detail
