#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "hcs/image.hpp"

namespace hcs {

/// Reads an 8- or 16-bit grayscale PNG (RGB is converted by channel mean)
/// onto the 0..255 scale; 16-bit samples are divided by 257.
Image2D read_png_gray(const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG; values are clipped and rounded.
void write_png_gray8(const std::filesystem::path& path, const Image2D& img);

/// Patch store format: 16-bit grayscale holding round(256 * value) clipped to
/// 0..65535, i.e. 8.8 fixed point on the 0..255 scale. Lossless for 8-bit data.
void write_patch_png(const std::filesystem::path& path, const Image2D& img);
Image2D read_patch_png(const std::filesystem::path& path);

/// Reads only the header and returns {height, width}.
std::pair<int, int> png_dimensions(const std::filesystem::path& path);

/// 8-bit RGB; `rgb` holds height*width*3 bytes.
void write_png_rgb(const std::filesystem::path& path, int height, int width,
                   const std::vector<std::uint8_t>& rgb);

}  // namespace hcs
