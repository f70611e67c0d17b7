// AVX2 variants of the pixel kernels. Compiled with -mavx2 and
// -ffp-contract=off; the arithmetic per output pixel mirrors the scalar
// reference exactly (same tap order, separate multiply and add, identical
// rounding), which keeps the two backends bit-identical.

#include "parc/pixel_kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define PARC_HAVE_AVX2_BUILD 1
#include <immintrin.h>
#else
#define PARC_HAVE_AVX2_BUILD 0
#endif

#include <algorithm>
#include <cmath>

namespace parc::kernels {

#if PARC_HAVE_AVX2_BUILD

namespace {

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

inline void store_u8_from_f32(const __m256 values, std::uint8_t* dst) {
    // floor(v + 0.5), clamp to [0,255], narrow to bytes.
    __m256 v = _mm256_floor_ps(_mm256_add_ps(values, _mm256_set1_ps(0.5f)));
    v = _mm256_min_ps(_mm256_max_ps(v, _mm256_setzero_ps()), _mm256_set1_ps(255.0f));
    __m256i i32 = _mm256_cvttps_epi32(v);
    __m128i lo = _mm256_castsi256_si128(i32);
    __m128i hi = _mm256_extracti128_si256(i32, 1);
    __m128i packed16 = _mm_packus_epi32(lo, hi);
    __m128i packed8 = _mm_packus_epi16(packed16, packed16);
    _mm_storel_epi64(reinterpret_cast<__m128i*>(dst), packed8);
}

void scale_round_clamp_u8_avx2(const std::uint8_t* src, std::uint8_t* dst, std::size_t n,
                               float factor) {
    const __m256 vfactor = _mm256_set1_ps(factor);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m128i bytes = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(src + i));
        __m256i i32 = _mm256_cvtepu8_epi32(bytes);
        __m256 v = _mm256_mul_ps(_mm256_cvtepi32_ps(i32), vfactor);
        store_u8_from_f32(v, dst + i);
    }
    for (; i < n; ++i) {
        float v = std::floor(static_cast<float>(src[i]) * factor + 0.5f);
        v = std::min(v, 255.0f);
        dst[i] = static_cast<std::uint8_t>(static_cast<int>(v));
    }
}

void conv_rows_f32_avx2(const float* src, float* dst, int width, int height, const float* taps,
                        int radius) {
    const int taps_n = 2 * radius + 1;
    for (int y = 0; y < height; ++y) {
        const float* row = src + static_cast<std::size_t>(y) * width;
        float* out = dst + static_cast<std::size_t>(y) * width;

        // Interior pixels: all taps read in-bounds, 8 outputs per step.
        const int lo = std::min(radius, width);
        const int hi = std::max(lo, width - radius);
        int x = lo;
        for (; x + 8 <= hi; x += 8) {
            __m256 acc = _mm256_setzero_ps();
            for (int t = 0; t < taps_n; ++t) {
                __m256 tap = _mm256_set1_ps(taps[t]);
                __m256 v = _mm256_loadu_ps(row + x - radius + t);
                acc = _mm256_add_ps(acc, _mm256_mul_ps(tap, v));
            }
            _mm256_storeu_ps(out + x, acc);
        }
        // Border columns and the interior tail share the scalar arithmetic.
        auto scalar_at = [&](int px) {
            float acc = 0.0f;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[k + radius] * row[clamp_index(px + k, width)];
            }
            out[px] = acc;
        };
        for (int px = 0; px < lo; ++px) scalar_at(px);
        for (int px = x; px < width; ++px) scalar_at(px);
    }
}

void conv_cols_f32_avx2(const float* src, float* dst, int width, int height, const float* taps,
                        int radius) {
    const int taps_n = 2 * radius + 1;
    for (int y = 0; y < height; ++y) {
        float* out = dst + static_cast<std::size_t>(y) * width;
        int x = 0;
        for (; x + 8 <= width; x += 8) {
            __m256 acc = _mm256_setzero_ps();
            for (int t = 0; t < taps_n; ++t) {
                const float* row =
                    src + static_cast<std::size_t>(clamp_index(y - radius + t, height)) * width;
                __m256 tap = _mm256_set1_ps(taps[t]);
                acc = _mm256_add_ps(acc, _mm256_mul_ps(tap, _mm256_loadu_ps(row + x)));
            }
            _mm256_storeu_ps(out + x, acc);
        }
        for (; x < width; ++x) {
            float acc = 0.0f;
            for (int k = -radius; k <= radius; ++k) {
                const float* row =
                    src + static_cast<std::size_t>(clamp_index(y + k, height)) * width;
                acc += taps[k + radius] * row[x];
            }
            out[x] = acc;
        }
    }
}

void round_clamp_f32_to_u8_avx2(const float* src, std::uint8_t* dst, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        store_u8_from_f32(_mm256_loadu_ps(src + i), dst + i);
    }
    for (; i < n; ++i) {
        float v = std::floor(src[i] + 0.5f);
        v = std::min(std::max(v, 0.0f), 255.0f);
        dst[i] = static_cast<std::uint8_t>(static_cast<int>(v));
    }
}

const PixelKernels kAvx2 = {
    "avx2",
    scale_round_clamp_u8_avx2,
    conv_rows_f32_avx2,
    conv_cols_f32_avx2,
    round_clamp_f32_to_u8_avx2,
};

}  // namespace

const PixelKernels* avx2_kernels() {
    return __builtin_cpu_supports("avx2") ? &kAvx2 : nullptr;
}

#else

const PixelKernels* avx2_kernels() { return nullptr; }

#endif

}  // namespace parc::kernels
