#include "parc/pixel_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace parc::kernels {

namespace {

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

void scale_round_clamp_u8_scalar(const std::uint8_t* src, std::uint8_t* dst, std::size_t n,
                                 float factor) {
    for (std::size_t i = 0; i < n; ++i) {
        float v = std::floor(static_cast<float>(src[i]) * factor + 0.5f);
        v = std::min(v, 255.0f);
        dst[i] = static_cast<std::uint8_t>(static_cast<int>(v));
    }
}

void conv_rows_f32_scalar(const float* src, float* dst, int width, int height, const float* taps,
                          int radius) {
    for (int y = 0; y < height; ++y) {
        const float* row = src + static_cast<std::size_t>(y) * width;
        float* out = dst + static_cast<std::size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            float acc = 0.0f;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[k + radius] * row[clamp_index(x + k, width)];
            }
            out[x] = acc;
        }
    }
}

void conv_cols_f32_scalar(const float* src, float* dst, int width, int height, const float* taps,
                          int radius) {
    for (int y = 0; y < height; ++y) {
        float* out = dst + static_cast<std::size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            float acc = 0.0f;
            for (int k = -radius; k <= radius; ++k) {
                const float* row = src + static_cast<std::size_t>(clamp_index(y + k, height)) * width;
                acc += taps[k + radius] * row[x];
            }
            out[x] = acc;
        }
    }
}

void round_clamp_f32_to_u8_scalar(const float* src, std::uint8_t* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        float v = std::floor(src[i] + 0.5f);
        v = std::min(std::max(v, 0.0f), 255.0f);
        dst[i] = static_cast<std::uint8_t>(static_cast<int>(v));
    }
}

const PixelKernels kScalar = {
    "scalar",
    scale_round_clamp_u8_scalar,
    conv_rows_f32_scalar,
    conv_cols_f32_scalar,
    round_clamp_f32_to_u8_scalar,
};

const PixelKernels* select_backend() {
    const char* override_name = std::getenv("PARC_KERNELS");
    if (override_name != nullptr) {
        if (std::strcmp(override_name, "scalar") == 0) return &kScalar;
        if (std::strcmp(override_name, "avx2") == 0) {
            const PixelKernels* avx2 = avx2_kernels();
            return avx2 != nullptr ? avx2 : &kScalar;
        }
    }
    const PixelKernels* avx2 = avx2_kernels();
    return avx2 != nullptr ? avx2 : &kScalar;
}

}  // namespace

const PixelKernels& scalar_kernels() { return kScalar; }

const PixelKernels& active_kernels() {
    static const PixelKernels* selected = select_backend();
    return *selected;
}

}  // namespace parc::kernels
