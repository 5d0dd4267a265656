#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ergopipe/types.hpp"

namespace ergopipe::io {

// PNG (8-bit gray/RGB) and binary PGM/PPM, chosen by extension.
ImageBuffer read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const ImageBuffer& img);

// All supported images in a directory, sorted by filename. The id is the
// stem; throws on duplicate stems so outputs stay unambiguous.
std::vector<std::pair<std::string, ImageBuffer>> read_image_dir(
    const std::filesystem::path& dir);

}  // namespace ergopipe::io
