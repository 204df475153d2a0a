#pragma once

// Single-threaded reference versions of the parallel kernels. They follow the
// textbook definitions (direct 2-D convolution, no separability) and exist to
// cross-check the production kernels in tests and to baseline the benchmarks.

#include "hcs/image.hpp"
#include "hcs/kernels.hpp"

namespace hcs::serial {

Image2D gaussian_convolve(const Image2D& img, double sigma);
Image2D gaussian_convolve(const Image2D& img, const GaussianKernel& kernel);
Image2D sobel_magnitude(const Image2D& img);
Image2D richardson_lucy(const Image2D& img, double psf_sigma, int iterations);

}  // namespace hcs::serial
