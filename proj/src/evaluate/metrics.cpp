#include "hcs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hcs/errors.hpp"
#include "hcs/kernels.hpp"

namespace hcs {
namespace {

// Correlation with a separable window, keeping only positions where the
// window lies fully inside the image.
Image2D filter_valid(const Image2D& img, const std::vector<double>& taps) {
    const int n = static_cast<int>(taps.size());
    const int out_h = img.height() - n + 1;
    const int out_w = img.width() - n + 1;
    Image2D rows(img.height(), out_w);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += taps[k] * img(y, x + k);
            rows(y, x) = acc;
        }
    Image2D out(out_h, out_w);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += taps[k] * rows(y + k, x);
            out(y, x) = acc;
        }
    return out;
}

struct SsimTerms {
    double ssim = 0.0;  // mean of luminance * contrast-structure
    double cs = 0.0;    // mean of contrast-structure
};

SsimTerms ssim_terms(const Image2D& a, const Image2D& b, const SsimOptions& o) {
    if (!a.same_shape(b)) throw ShapeError("ssim inputs differ in shape");
    if (a.height() < o.window_size || a.width() < o.window_size)
        throw ShapeError("image smaller than the ssim window");
    const auto kernel = make_gaussian_kernel(o.window_sigma, o.window_size / 2);

    Image2D aa(a.height(), a.width());
    Image2D bb(a.height(), a.width());
    Image2D ab(a.height(), a.width());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a.pixels()[i];
        const double y = b.pixels()[i];
        aa.pixels()[i] = x * x;
        bb.pixels()[i] = y * y;
        ab.pixels()[i] = x * y;
    }
    const Image2D mu_a = filter_valid(a, kernel.taps);
    const Image2D mu_b = filter_valid(b, kernel.taps);
    const Image2D e_aa = filter_valid(aa, kernel.taps);
    const Image2D e_bb = filter_valid(bb, kernel.taps);
    const Image2D e_ab = filter_valid(ab, kernel.taps);

    const double c1 = (o.k1 * o.dynamic_range) * (o.k1 * o.dynamic_range);
    const double c2 = (o.k2 * o.dynamic_range) * (o.k2 * o.dynamic_range);
    double sum_ssim = 0.0;
    double sum_cs = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a.pixels()[i];
        const double mb = mu_b.pixels()[i];
        const double var_a = e_aa.pixels()[i] - ma * ma;
        const double var_b = e_bb.pixels()[i] - mb * mb;
        const double cov = e_ab.pixels()[i] - ma * mb;
        const double lum = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
        const double cs = (2.0 * cov + c2) / (var_a + var_b + c2);
        sum_ssim += lum * cs;
        sum_cs += cs;
    }
    const auto n = static_cast<double>(mu_a.size());
    return {sum_ssim / n, sum_cs / n};
}

Image2D average_pool2(const Image2D& img) {
    const int h = img.height() / 2;
    const int w = img.width() / 2;
    Image2D out(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out(y, x) = 0.25 * (img(2 * y, 2 * x) + img(2 * y, 2 * x + 1) + img(2 * y + 1, 2 * x) +
                                img(2 * y + 1, 2 * x + 1));
    return out;
}

}  // namespace

double ssim(const Image2D& a, const Image2D& b, const SsimOptions& options) {
    return ssim_terms(a, b, options).ssim;
}

double msssim(const Image2D& a, const Image2D& b, int scales, const SsimOptions& options) {
    if (scales < 1 || scales > static_cast<int>(kMsssimWeights.size()))
        throw ParameterError("ms-ssim supports 1 to 5 scales");
    if (!a.same_shape(b)) throw ShapeError("ms-ssim inputs differ in shape");
    const int need = options.window_size * (1 << (scales - 1));
    if (std::min(a.height(), a.width()) < need)
        throw ShapeError("image too small for " + std::to_string(scales) + " ms-ssim scales");

    const double weight_sum =
        std::accumulate(kMsssimWeights.begin(), kMsssimWeights.begin() + scales, 0.0);
    Image2D x = a;
    Image2D y = b;
    double result = 1.0;
    for (int s = 0; s < scales; ++s) {
        const SsimTerms t = ssim_terms(x, y, options);
        const double w = kMsssimWeights[static_cast<std::size_t>(s)] / weight_sum;
        const double term = s + 1 == scales ? t.ssim : t.cs;
        result *= std::pow(std::max(term, 0.0), w);
        if (s + 1 < scales) {
            x = average_pool2(x);
            y = average_pool2(y);
        }
    }
    return result;
}

double auc_roc(const Image2D& ground_truth, const Image2D& reconstruction) {
    if (!ground_truth.same_shape(reconstruction)) throw ShapeError("auc inputs differ in shape");
    const double mean = ground_truth.mean();
    const auto gt = ground_truth.pixels();
    const auto score = reconstruction.pixels();

    std::vector<std::size_t> order(gt.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return score[i] < score[j]; });

    double rank_sum_pos = 0.0;
    double n_pos = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && score[order[j]] == score[order[i]]) ++j;
        // Ranks i+1..j share their average.
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (gt[order[k]] > mean) {
                rank_sum_pos += avg_rank;
                n_pos += 1.0;
            }
        }
        i = j;
    }
    const double n_neg = static_cast<double>(gt.size()) - n_pos;
    if (n_pos == 0.0 || n_neg == 0.0)
        throw DegenerateInputError("auc needs both positive and negative ground-truth pixels");
    return (rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

}  // namespace hcs
