#pragma once
// The five vision variations: answer-preserving pixel transforms (blur,
// brighten, rotate) and the answer-changing prompt transforms (image swap
// and the annotated image exchange filter).

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "parc/core.hpp"
#include "parc/ingest.hpp"

namespace parc {

// 8-bit RGB, row-major interleaved.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // height * width * 3

    static ImageBuffer filled(int width, int height, std::uint8_t r, std::uint8_t g,
                              std::uint8_t b);
    std::uint8_t* at(int x, int y) {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    const std::uint8_t* at(int x, int y) const {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }

    bool operator==(const ImageBuffer&) const = default;
};

// Gaussian low-pass with standard deviation sigma (pixels), truncated at
// radius ceil(3*sigma), edge-clamp padding, separable float32 passes with a
// final floor(x + 0.5) rounding. Deterministic: identical input bytes give
// identical output bytes. Requires sigma > 0.
ImageBuffer blur(const ImageBuffer& img, double sigma);

// Per-channel v -> clamp(round(v * factor), 0, 255). Requires factor > 0;
// factor 1.0 is the identity.
ImageBuffer brighten(const ImageBuffer& img, double factor);

// 90 degree clockwise rotation; output dimensions are swapped.
ImageBuffer rotate90(const ImageBuffer& img);

// Left and right images side by side with an 8 px white gutter, for models
// that accept a single image. Unequal heights are padded with white.
ImageBuffer compose_side_by_side(const ImageBuffer& left, const ImageBuffer& right);

// Exchanges the left/right roles and flips the correct answer between the
// Left and Right options; original_correct is preserved. Requires a
// comparative prompt (two images, Left/Right options, one correct letter).
Prompt swap_images(const Prompt& prompt);

// Manual annotation of exchangeable images: for one question text, which
// losing images would each losing image win against.
struct ExchangeAnnotation {
    std::string question_text;
    std::string loser_image;
    std::vector<std::string> beats;
};

// Line-delimited {"question_text", "loser_image", "beats": [...]} records.
std::vector<ExchangeAnnotation> load_annotations(const std::filesystem::path& path);

// The four-step exchange procedure over a comparative dataset:
//   1. keep only prompts whose question text occurs at least twice;
//   2. collect the losing images per question;
//   3. look up which losing images each loser would win against;
//   4. replace each prompt's winning image with such an image and flip the
//      correct answer, or discard the prompt when no exchange is annotated.
// Survivors carry variation VS-E, fresh ids and parent links. Annotations
// must reference images that occur as losers of their question.
DatasetHandle exchange_filter(const DatasetHandle& dataset,
                              std::span<const ExchangeAnnotation> annotations);

}  // namespace parc
