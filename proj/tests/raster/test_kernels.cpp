#include <random>
#include <vector>

#include "colier/raster/kernels.hpp"
#include "doctest.h"

using namespace colier::raster;

namespace {

std::vector<std::uint8_t> random_row(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint8_t> row(n * 4);
  std::uniform_int_distribution<int> byte(0, 255), pick(0, 7);
  for (std::size_t i = 0; i < row.size(); ++i) {
    int v = byte(rng);
    // Bias alpha toward the edge cases 0 and 255.
    if (i % 4 == 3 && pick(rng) < 2) v = pick(rng) == 0 ? 0 : 255;
    row[i] = static_cast<std::uint8_t>(v);
  }
  return row;
}

}  // namespace

TEST_CASE("active kernel table is one of the known variants") {
  const auto& k = active_kernels();
  CHECK((&k == &scalar_kernels() || &k == avx2_kernels()));
  MESSAGE("active kernels: " << k.name);
}

TEST_CASE("avx2 kernels are byte-identical to scalar") {
  const KernelTable* simd = avx2_kernels();
  if (!simd) {
    MESSAGE("avx2 not available; nothing to compare");
    return;
  }
  const KernelTable& ref = scalar_kernels();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int iter = 0; iter < 3000; ++iter) {
    const std::size_t n = iter % 37;
    const auto src = random_row(rng, n);
    const auto dst = random_row(rng, n);
    const double op = iter % 7 == 0 ? 1.0 : (iter % 11 == 0 ? 0.0 : unit(rng));

    auto a = dst, b = dst;
    ref.composite_over_row(a.data(), src.data(), n, op);
    simd->composite_over_row(b.data(), src.data(), n, op);
    REQUIRE(a == b);

    std::vector<double> factor(n);
    for (auto& f : factor) f = iter % 5 == 0 ? 1.0 : unit(rng);
    a = dst;
    b = dst;
    ref.scale_rgb_row(a.data(), factor.data(), n);
    simd->scale_rgb_row(b.data(), factor.data(), n);
    REQUIRE(a == b);
  }
}

TEST_CASE("scalar composite reference values") {
  std::uint8_t dst[4] = {0, 0, 255, 255};
  const std::uint8_t src[4] = {255, 0, 0, 255};
  scalar_kernels().composite_over_row(dst, src, 1, 0.5);
  CHECK(dst[0] == 128);
  CHECK(dst[1] == 0);
  CHECK(dst[2] == 128);
  CHECK(dst[3] == 255);

  std::uint8_t keep[4] = {1, 2, 3, 4};
  const std::uint8_t clear[4] = {9, 9, 9, 0};
  scalar_kernels().composite_over_row(keep, clear, 1, 1.0);
  CHECK(keep[0] == 1);
  CHECK(keep[3] == 4);
}
