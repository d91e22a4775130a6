#pragma once

#include <filesystem>
#include <string>

#include "shoesplat/image.hpp"

namespace shoesplat {

/// Reads an 8-bit PNG. Gray, gray+alpha, RGB and RGBA are returned with 1, 2,
/// 3 and 4 channels respectively; 16-bit files are reduced to 8 bits.
ImageU8 read_png(const std::filesystem::path& path);

/// Writes an 8-bit PNG with 1, 2, 3 or 4 channels. Output bytes are a pure
/// function of the pixel data.
std::string encode_png(const ImageU8& image);
void write_png(const std::filesystem::path& path, const ImageU8& image);

}  // namespace shoesplat
