#include "hcs/image.hpp"

#include <algorithm>
#include <numeric>

#include "hcs/errors.hpp"

namespace hcs {

Image2D::Image2D(int height, int width, double fill, PixelType type)
    : height_(height), width_(width), type_(type) {
    if (height < 1 || width < 1) throw ShapeError("image dimensions must be >= 1");
    pixels_.assign(static_cast<std::size_t>(height) * width, fill);
}

Image2D::Image2D(int height, int width, std::vector<double> pixels, PixelType type)
    : height_(height), width_(width), pixels_(std::move(pixels)), type_(type) {
    if (height < 1 || width < 1) throw ShapeError("image dimensions must be >= 1");
    if (pixels_.size() != static_cast<std::size_t>(height) * width)
        throw ShapeError("pixel buffer does not match image dimensions");
}

double Image2D::sum() const noexcept {
    return std::accumulate(pixels_.begin(), pixels_.end(), 0.0);
}

double Image2D::mean() const noexcept {
    return pixels_.empty() ? 0.0 : sum() / static_cast<double>(pixels_.size());
}

double Image2D::min() const noexcept {
    return pixels_.empty() ? 0.0 : *std::min_element(pixels_.begin(), pixels_.end());
}

double Image2D::max() const noexcept {
    return pixels_.empty() ? 0.0 : *std::max_element(pixels_.begin(), pixels_.end());
}

Image2D Image2D::transposed() const {
    Image2D out(width_, height_, 0.0, type_);
    for (int r = 0; r < height_; ++r)
        for (int c = 0; c < width_; ++c) out(c, r) = (*this)(r, c);
    return out;
}

Image2D Image2D::crop(int row0, int col0, int h, int w) const {
    if (row0 < 0 || col0 < 0 || h < 1 || w < 1 || row0 + h > height_ || col0 + w > width_)
        throw ShapeError("crop window outside image");
    Image2D out(h, w, 0.0, type_);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) out(r, c) = (*this)(row0 + r, col0 + c);
    return out;
}

BinaryMask::BinaryMask(int height, int width, bool fill) : height_(height), width_(width) {
    if (height < 1 || width < 1) throw ShapeError("mask dimensions must be >= 1");
    bits_.assign(static_cast<std::size_t>(height) * width, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask threshold_above(const Image2D& img, double threshold) {
    BinaryMask mask(img.height(), img.width());
    auto src = img.pixels();
    auto dst = mask.bits();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > threshold ? 1 : 0;
    return mask;
}

}  // namespace hcs
