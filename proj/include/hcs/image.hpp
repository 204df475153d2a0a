#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hcs {

enum class PixelType { Float, UInt8 };

/// Row-major 2-D intensity image. Pipeline images live on the 0..255 scale;
/// UInt8-tagged images hold integral values only.
class Image2D {
public:
    Image2D() = default;
    Image2D(int height, int width, double fill = 0.0, PixelType type = PixelType::Float);
    Image2D(int height, int width, std::vector<double> pixels, PixelType type = PixelType::Float);

    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] std::size_t size() const noexcept { return pixels_.size(); }
    [[nodiscard]] bool empty() const noexcept { return pixels_.empty(); }
    [[nodiscard]] PixelType type() const noexcept { return type_; }
    void set_type(PixelType type) noexcept { type_ = type; }

    double& operator()(int row, int col) noexcept { return pixels_[index(row, col)]; }
    double operator()(int row, int col) const noexcept { return pixels_[index(row, col)]; }

    [[nodiscard]] std::span<double> pixels() noexcept { return pixels_; }
    [[nodiscard]] std::span<const double> pixels() const noexcept { return pixels_; }

    [[nodiscard]] bool same_shape(const Image2D& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }

    [[nodiscard]] double sum() const noexcept;
    [[nodiscard]] double mean() const noexcept;
    [[nodiscard]] double min() const noexcept;
    [[nodiscard]] double max() const noexcept;
    [[nodiscard]] Image2D transposed() const;

    /// Copy of the rectangle [row0, row0+h) x [col0, col0+w); must lie inside the image.
    [[nodiscard]] Image2D crop(int row0, int col0, int h, int w) const;

    friend bool operator==(const Image2D&, const Image2D&) = default;

private:
    [[nodiscard]] std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<double> pixels_;
    PixelType type_ = PixelType::Float;
};

/// Boolean image; shape matches the image it was derived from.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int height, int width, bool fill = false);

    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }

    [[nodiscard]] bool operator()(int row, int col) const noexcept {
        return bits_[static_cast<std::size_t>(row) * width_ + col] != 0;
    }
    void set(int row, int col, bool value) noexcept {
        bits_[static_cast<std::size_t>(row) * width_ + col] = value ? 1 : 0;
    }

    [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    [[nodiscard]] std::span<std::uint8_t> bits() noexcept { return bits_; }

    [[nodiscard]] std::size_t count() const noexcept;
    [[nodiscard]] bool same_shape(const BinaryMask& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Pixelwise `img > threshold`.
BinaryMask threshold_above(const Image2D& img, double threshold);

}  // namespace hcs
