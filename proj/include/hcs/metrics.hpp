#pragma once

#include <array>

#include "hcs/image.hpp"

namespace hcs {

/// Gaussian-window SSIM settings (window 11, sigma 1.5, 8-bit dynamic range).
struct SsimOptions {
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
    double window_sigma = 1.5;
    int window_size = 11;
};

/// Standard five-scale MS-SSIM exponents; fewer scales use the leading
/// entries renormalized to sum to one.
inline constexpr std::array<double, 5> kMsssimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

/// Local SSIM statistics are computed over full windows only (no padding);
/// the result is the mean of the SSIM map.
double ssim(const Image2D& a, const Image2D& b, const SsimOptions& options = {});

/// Multi-scale SSIM. Scales 1..M-1 contribute their mean contrast-structure
/// term, the coarsest scale its mean SSIM; negative terms are clamped to 0
/// before exponentiation. Between scales both images are 2x2 average-pooled.
/// Requires min side >= window_size * 2^(scales-1).
double msssim(const Image2D& a, const Image2D& b, int scales = 4, const SsimOptions& options = {});

/// Pixel-level ROC AUC: ground-truth pixels above the ground-truth mean are
/// positives, reconstruction intensities are scores, ties count one half.
/// Throws DegenerateInputError if the ground truth has a single class.
double auc_roc(const Image2D& ground_truth, const Image2D& reconstruction);

}  // namespace hcs
