#pragma once

#include <cstddef>
#include <cstdint>

namespace colier::raster::detail {

void composite_over_row_scalar(std::uint8_t* dst, const std::uint8_t* src, std::size_t n, double opacity);
void scale_rgb_row_scalar(std::uint8_t* px, const double* factor, std::size_t n);

#if defined(COLIER_HAVE_AVX2)
void composite_over_row_avx2(std::uint8_t* dst, const std::uint8_t* src, std::size_t n, double opacity);
void scale_rgb_row_avx2(std::uint8_t* px, const double* factor, std::size_t n);
#endif

}  // namespace colier::raster::detail
