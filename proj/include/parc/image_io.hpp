#pragma once
// PNG/JPEG decoding and PNG encoding for the vision variations. PNG is the
// write format so pixel transforms round-trip losslessly.

#include <filesystem>

#include "parc/vis_vary.hpp"

namespace parc {

// Detects the format from magic bytes; decodes to 8-bit RGB.
ImageBuffer read_image(const std::filesystem::path& path);

void write_png(const ImageBuffer& img, const std::filesystem::path& path);

}  // namespace parc
