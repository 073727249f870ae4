#pragma once

#include <cstddef>
#include <cstdint>

namespace colier::raster {

/// Row kernels shared by the renderer. Every variant must produce the same
/// bytes as the scalar one.
struct KernelTable {
  const char* name;

  /// Source-over of `src` (alpha scaled by `opacity`) onto `dst`, `n` pixels.
  void (*composite_over_row)(std::uint8_t* dst, const std::uint8_t* src, std::size_t n, double opacity);

  /// RGB channels multiplied by a per-pixel factor in [0, 1]; alpha kept.
  void (*scale_rgb_row)(std::uint8_t* px, const double* factor, std::size_t n);
};

const KernelTable& scalar_kernels();

/// Null when the AVX2 variant is not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();

/// Best supported table. COLIER_KERNELS=scalar forces the reference path.
const KernelTable& active_kernels();

}  // namespace colier::raster
