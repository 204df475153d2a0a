#include "hcs/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

#include "hcs/errors.hpp"

namespace hcs {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw DataError("cannot open " + path.string());
    return f;
}

struct RawPng {
    int height = 0;
    int width = 0;
    int bit_depth = 8;
    int channels = 1;
    std::vector<std::uint8_t> bytes;  // row-major, big-endian samples for 16-bit
};

RawPng read_raw(const std::filesystem::path& path, bool header_only) {
    auto file = open_file(path, "rb");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DataError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DataError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("malformed png: " + path.string());
    }
    png_init_io(png, file.get());
    png_read_info(png, info);

    RawPng raw;
    raw.width = static_cast<int>(png_get_image_width(png, info));
    raw.height = static_cast<int>(png_get_image_height(png, info));
    if (header_only) {
        png_destroy_read_struct(&png, &info, nullptr);
        return raw;
    }

    const int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    raw.bit_depth = png_get_bit_depth(png, info);
    raw.channels = png_get_channels(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    raw.bytes.resize(rowbytes * static_cast<std::size_t>(raw.height));
    std::vector<png_bytep> rows(static_cast<std::size_t>(raw.height));
    for (int r = 0; r < raw.height; ++r) rows[r] = raw.bytes.data() + rowbytes * r;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return raw;
}

void write_raw(const std::filesystem::path& path, int height, int width, int bit_depth,
               int color_type, const std::vector<std::uint8_t>& bytes) {
    auto file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DataError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw DataError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw DataError("failed writing png: " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
    const std::size_t rowbytes = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
    for (int r = 0; r < height; ++r)
        png_write_row(png, const_cast<png_bytep>(bytes.data() + rowbytes * r));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// Returns sample values (0..255 or 0..65535) averaged over color channels.
Image2D samples(const RawPng& raw) {
    Image2D img(raw.height, raw.width);
    const int bytes_per_sample = raw.bit_depth / 8;
    for (int r = 0; r < raw.height; ++r) {
        for (int c = 0; c < raw.width; ++c) {
            double acc = 0.0;
            for (int ch = 0; ch < raw.channels; ++ch) {
                const std::size_t at =
                    ((static_cast<std::size_t>(r) * raw.width + c) * raw.channels + ch) *
                    bytes_per_sample;
                acc += bytes_per_sample == 2 ? (raw.bytes[at] << 8 | raw.bytes[at + 1])
                                             : raw.bytes[at];
            }
            img(r, c) = acc / raw.channels;
        }
    }
    return img;
}

}  // namespace

Image2D read_png_gray(const std::filesystem::path& path) {
    const RawPng raw = read_raw(path, false);
    Image2D img = samples(raw);
    if (raw.bit_depth == 16)
        for (double& v : img.pixels()) v /= 257.0;
    bool integral = true;
    for (double v : img.pixels()) integral = integral && v == std::floor(v);
    img.set_type(integral ? PixelType::UInt8 : PixelType::Float);
    return img;
}

void write_png_gray8(const std::filesystem::path& path, const Image2D& img) {
    std::vector<std::uint8_t> bytes(img.size());
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i)
        bytes[i] = static_cast<std::uint8_t>(std::nearbyint(std::clamp(px[i], 0.0, 255.0)));
    write_raw(path, img.height(), img.width(), 8, PNG_COLOR_TYPE_GRAY, bytes);
}

void write_patch_png(const std::filesystem::path& path, const Image2D& img) {
    std::vector<std::uint8_t> bytes(img.size() * 2);
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        const auto q = static_cast<std::uint16_t>(std::clamp(std::nearbyint(px[i] * 256.0), 0.0, 65535.0));
        bytes[2 * i] = static_cast<std::uint8_t>(q >> 8);
        bytes[2 * i + 1] = static_cast<std::uint8_t>(q & 0xff);
    }
    write_raw(path, img.height(), img.width(), 16, PNG_COLOR_TYPE_GRAY, bytes);
}

Image2D read_patch_png(const std::filesystem::path& path) {
    const RawPng raw = read_raw(path, false);
    if (raw.bit_depth != 16 || raw.channels != 1)
        throw DataError("patch file is not 16-bit grayscale: " + path.string());
    Image2D img = samples(raw);
    bool integral = true;
    for (double& v : img.pixels()) {
        v /= 256.0;
        integral = integral && v == std::floor(v);
    }
    img.set_type(integral ? PixelType::UInt8 : PixelType::Float);
    return img;
}

std::pair<int, int> png_dimensions(const std::filesystem::path& path) {
    const RawPng raw = read_raw(path, true);
    return {raw.height, raw.width};
}

void write_png_rgb(const std::filesystem::path& path, int height, int width,
                   const std::vector<std::uint8_t>& rgb) {
    if (rgb.size() != static_cast<std::size_t>(height) * width * 3)
        throw ShapeError("rgb buffer does not match dimensions");
    write_raw(path, height, width, 8, PNG_COLOR_TYPE_RGB, rgb);
}

}  // namespace hcs
