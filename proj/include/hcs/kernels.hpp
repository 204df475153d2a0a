#pragma once

// Image primitives shared by every pipeline stage. The functions in `hcs::` are
// the OpenMP-parallel production kernels; `hcs::serial::` (serial_kernels.hpp)
// holds straightforward single-threaded references used by tests and benchmarks.
//
// Boundary policy for every convolution here: reflect padding without edge
// repetition (d c b | a b c d | c b a), applied repeatedly for kernels wider
// than the image.

#include <span>
#include <vector>

#include "hcs/image.hpp"

namespace hcs {

/// Sampled, normalized 1-D Gaussian; the 2-D kernel is the outer product.
struct GaussianKernel {
    double sigma = 1.0;
    int radius = 4;
    std::vector<double> taps;  // 2*radius+1 entries, sum == 1

    [[nodiscard]] double weight(int dy, int dx) const noexcept {
        return taps[static_cast<std::size_t>(dy + radius)] *
               taps[static_cast<std::size_t>(dx + radius)];
    }
};

/// Truncation radius ceil(4 sigma).
GaussianKernel make_gaussian_kernel(double sigma);
GaussianKernel make_gaussian_kernel(double sigma, int radius);

/// Maps an out-of-range index into [0, n) by mirror reflection.
[[nodiscard]] int reflect_index(int i, int n) noexcept;

/// Separable correlation with the same 1-D taps along rows and columns.
Image2D convolve_separable(const Image2D& img, std::span<const double> taps);

/// g_sigma * img. Throws ParameterError for sigma <= 0.
Image2D gaussian_convolve(const Image2D& img, double sigma);
Image2D gaussian_convolve(const Image2D& img, const GaussianKernel& kernel);

/// sqrt(Gx^2 + Gy^2) with the 3x3 Sobel pair.
Image2D sobel_magnitude(const Image2D& img);

/// Bilinear resampling with half-pixel centers (edge samples clamp).
Image2D resize(const Image2D& img, int out_height, int out_width);

/// Clip to [0, 255], round half to even, tag UInt8.
Image2D to_uint8(const Image2D& img);

/// Otsu threshold over a 256-bin histogram spanning [min, max] of the image.
/// The returned value sits midway between the largest pixel of the lower
/// class and the smallest pixel of the upper class, so `pixel > threshold`
/// reproduces the optimal histogram split exactly. Ties go to the lowest bin.
/// Throws DegenerateInputError on constant images.
double otsu_threshold(const Image2D& img);

}  // namespace hcs
