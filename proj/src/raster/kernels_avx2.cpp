// Built with -mavx2 only. Operation order mirrors the scalar kernels step for
// step so results are bit-identical (no FMA, no reassociation).
#include <immintrin.h>

#include "kernels_internal.hpp"

namespace colier::raster::detail {
namespace {

// Channel c of four packed RGBA pixels, widened to doubles.
inline __m256d channel(__m128i px, int c) {
  const __m128i sel = _mm_setr_epi8(static_cast<char>(c), -1, -1, -1, static_cast<char>(4 + c), -1, -1, -1,
                                    static_cast<char>(8 + c), -1, -1, -1, static_cast<char>(12 + c), -1, -1, -1);
  return _mm256_cvtepi32_pd(_mm_shuffle_epi8(px, sel));
}

// Four doubles already in [0, 255] back into byte lane c of each pixel.
inline __m128i place(__m256d v, int c) {
  const __m128i i32 = _mm256_cvttpd_epi32(v);
  const __m128i sel = _mm_setr_epi8(c == 0 ? 0 : -1, c == 1 ? 0 : -1, c == 2 ? 0 : -1, c == 3 ? 0 : -1,
                                    c == 0 ? 4 : -1, c == 1 ? 4 : -1, c == 2 ? 4 : -1, c == 3 ? 4 : -1,
                                    c == 0 ? 8 : -1, c == 1 ? 8 : -1, c == 2 ? 8 : -1, c == 3 ? 8 : -1,
                                    c == 0 ? 12 : -1, c == 1 ? 12 : -1, c == 2 ? 12 : -1, c == 3 ? 12 : -1);
  return _mm_shuffle_epi8(i32, sel);
}

inline __m256d round_half_up(__m256d v) { return _mm256_floor_pd(_mm256_add_pd(v, _mm256_set1_pd(0.5))); }

}  // namespace

void composite_over_row_avx2(std::uint8_t* dst, const std::uint8_t* src, std::size_t n, double opacity) {
  const __m256d op = _mm256_set1_pd(opacity);
  const __m256d inv255 = _mm256_set1_pd(255.0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i s = _mm_loadu_si128(reinterpret_cast<const __m128i*>(src + i * 4));
    const __m128i d = _mm_loadu_si128(reinterpret_cast<const __m128i*>(dst + i * 4));

    const __m256d sa = _mm256_div_pd(_mm256_mul_pd(channel(s, 3), op), inv255);
    const __m256d keep = _mm256_cmp_pd(sa, zero, _CMP_EQ_OQ);
    if (_mm256_movemask_pd(keep) == 0xF) continue;
    const __m256d da = _mm256_div_pd(channel(d, 3), inv255);
    const __m256d k = _mm256_mul_pd(da, _mm256_sub_pd(one, sa));
    __m256d oa = _mm256_add_pd(sa, k);
    // Lanes with sa == 0 are discarded below; keep their divisor non-zero.
    oa = _mm256_blendv_pd(oa, one, keep);

    __m128i out = place(round_half_up(_mm256_mul_pd(oa, inv255)), 3);
    for (int c = 0; c < 3; ++c) {
      const __m256d v = _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(channel(s, c), sa), _mm256_mul_pd(channel(d, c), k)), oa);
      out = _mm_or_si128(out, place(round_half_up(v), c));
    }
    // Per-pixel select: untouched destination where sa == 0.
    const __m128i keep32 = _mm256_cvtpd_epi32(_mm256_and_pd(keep, _mm256_set1_pd(1.0)));
    const __m128i mask = _mm_cmpeq_epi32(keep32, _mm_set1_epi32(1));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(dst + i * 4), _mm_blendv_epi8(out, d, mask));
  }
  composite_over_row_scalar(dst + i * 4, src + i * 4, n - i, opacity);
}

void scale_rgb_row_avx2(std::uint8_t* px, const double* factor, std::size_t n) {
  const __m128i alpha_mask = _mm_set1_epi32(static_cast<int>(0xFF000000u));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i p = _mm_loadu_si128(reinterpret_cast<const __m128i*>(px + i * 4));
    const __m256d f = _mm256_loadu_pd(factor + i);
    __m128i out = _mm_and_si128(p, alpha_mask);
    for (int c = 0; c < 3; ++c) out = _mm_or_si128(out, place(round_half_up(_mm256_mul_pd(channel(p, c), f)), c));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(px + i * 4), out);
  }
  scale_rgb_row_scalar(px + i * 4, factor + i, n - i);
}

}  // namespace colier::raster::detail
