#pragma once

#include "hcs/image.hpp"

namespace hcs {

inline constexpr int kDefaultRlIterations = 30;

/// Richardson-Lucy deconvolution with a Gaussian PSF of width `psf_sigma`:
///   x_{k+1} = x_k * K^T(y / K x_k),  x_0 = mean(y),
/// where ratios with K x_k < 1e-12 are taken as 0. Output is non-negative.
/// Throws DegenerateInputError on negative pixels, ParameterError on
/// iterations < 1 or psf_sigma <= 0.
Image2D richardson_lucy(const Image2D& img, double psf_sigma, int iterations = kDefaultRlIterations);

/// Classical baseline segmentation: sobel_magnitude(img) > otsu(sobel_magnitude(img)).
BinaryMask sobel_otsu_segment(const Image2D& img);

}  // namespace hcs
