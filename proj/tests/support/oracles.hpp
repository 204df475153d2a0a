#pragma once
// Independent reference computations used by the unit and acceptance tests.
// Everything here is written directly from the textbook definitions and does
// not call into the library's numerical kernels.

#include <cstdint>
#include <random>
#include <vector>

#include "hcs/image.hpp"

namespace hcs::oracle {

/// Uniform random image with values in [lo, hi].
Image2D random_image(std::mt19937_64& rng, int h, int w, double lo = 0.0, double hi = 255.0);
/// Random integer-valued image in [lo, hi].
Image2D random_uint8_image(std::mt19937_64& rng, int h, int w, int lo = 0, int hi = 255);

int reflect(int i, int n);

/// exp(-(dx^2)/(2 sigma^2)) normalized over [-radius, radius].
std::vector<double> gaussian_taps(double sigma, int radius);

/// Direct 2-D correlation with the outer-product Gaussian, reflect boundary.
Image2D gaussian_direct(const Image2D& img, double sigma);

/// Bilinear resize, half-pixel centers, clamped edges.
Image2D bilinear(const Image2D& img, int out_h, int out_w);

/// Clip, round half to even.
double round_uint8(double v);

/// Otsu by sweeping every value threshold t (class 0: v <= t) over the
/// integer range of an 8-bit image, exact integer arithmetic; smallest t wins.
int otsu_sweep_uint8(const Image2D& img);

/// Gaussian-window SSIM evaluated window by window (valid positions only).
struct SsimWindowStats {
    double ssim = 0.0;
    double cs = 0.0;
};
SsimWindowStats ssim_windows(const Image2D& a, const Image2D& b, int window = 11, double sigma = 1.5);

/// Multi-scale recombination: cs at the fine scales, ssim at the coarsest,
/// 2x2 mean pooling in between, negative terms clamped to zero.
double msssim_scales(const Image2D& a, const Image2D& b, int scales);

/// Pairwise AUC over every (positive, negative) pixel pair.
double auc_pairwise(const Image2D& gt, const Image2D& score);

/// |{p : min_q |p - q| <= r, q in nucleus}| minus the nucleus, by direct
/// enumeration over all pixel pairs.
BinaryMask ring_bruteforce(const BinaryMask& nucleus, int radius);

/// Pearson correlation of two equally sized images.
double correlation(const Image2D& a, const Image2D& b);

BinaryMask disk_mask(int h, int w, double cy, double cx, double r);
Image2D disk_image(int h, int w, double cy, double cx, double r, double inside, double outside = 0.0);

}  // namespace hcs::oracle
