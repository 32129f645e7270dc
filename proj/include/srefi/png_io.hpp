#pragma once

#include <filesystem>

#include "srefi/image.hpp"

namespace srefi {

// Decodes a PNG file into 8-bit RGB. Grayscale, palette and 16-bit inputs
// are expanded/stripped to RGB8; an alpha channel is dropped.
ImageRGB8 read_png(const std::filesystem::path& path);

// Encodes 8-bit RGB with fixed settings so identical pixels always produce
// identical bytes.
void write_png(const std::filesystem::path& path, const ImageRGB8& image);

}  // namespace srefi
