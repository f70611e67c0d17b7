#pragma once
// Data-parallel inner loops of the image operations: brightness scaling and
// edge-clamped separable convolution. A scalar reference implementation is
// always available; an AVX2 variant is selected at runtime when the CPU
// supports it. Both variants perform the identical float32 operation
// sequence per output pixel (multiply then add, no FMA, final
// floor(x + 0.5) rounding), so their outputs are bit-identical and the
// selection never affects results. The suite enforces this equivalence on
// random inputs.
//
// Override the automatic selection with PARC_KERNELS=scalar|avx2.

#include <cstddef>
#include <cstdint>

namespace parc::kernels {

struct PixelKernels {
    const char* name;

    // dst[i] = clamp(floor(src[i] * factor + 0.5f), 0, 255), float32 math.
    void (*scale_round_clamp_u8)(const std::uint8_t* src, std::uint8_t* dst, std::size_t n,
                                 float factor);

    // Horizontal pass: every row convolved with taps[0..2r], indices clamped
    // to [0, width). Accumulation runs in tap order.
    void (*conv_rows_f32)(const float* src, float* dst, int width, int height, const float* taps,
                          int radius);

    // Vertical pass: same contract along columns, rows clamped to [0, height).
    void (*conv_cols_f32)(const float* src, float* dst, int width, int height, const float* taps,
                          int radius);

    // dst[i] = clamp(floor(src[i] + 0.5f), 0, 255).
    void (*round_clamp_f32_to_u8)(const float* src, std::uint8_t* dst, std::size_t n);
};

const PixelKernels& scalar_kernels();

// Null when this build or CPU has no AVX2 path.
const PixelKernels* avx2_kernels();

// The runtime-selected backend (AVX2 when available unless overridden).
const PixelKernels& active_kernels();

}  // namespace parc::kernels
