#include "colier/raster/kernels.hpp"

#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace colier::raster {

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", detail::composite_over_row_scalar, detail::scale_rgb_row_scalar};
  return table;
}

const KernelTable* avx2_kernels() {
#if defined(COLIER_HAVE_AVX2)
  static const KernelTable table{"avx2", detail::composite_over_row_avx2, detail::scale_rgb_row_avx2};
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    const char* env = std::getenv("COLIER_KERNELS");
    if (env && std::string_view(env) == "scalar") return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace colier::raster
