#include "hcs/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "hcs/errors.hpp"

namespace hcs {

GaussianKernel make_gaussian_kernel(double sigma) {
    if (!(sigma > 0.0)) throw ParameterError("gaussian sigma must be > 0");
    return make_gaussian_kernel(sigma, static_cast<int>(std::ceil(4.0 * sigma)));
}

GaussianKernel make_gaussian_kernel(double sigma, int radius) {
    if (!(sigma > 0.0)) throw ParameterError("gaussian sigma must be > 0");
    if (radius < 0) throw ParameterError("gaussian radius must be >= 0");
    GaussianKernel k;
    k.sigma = sigma;
    k.radius = radius;
    k.taps.resize(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
        k.taps[static_cast<std::size_t>(i + radius)] = w;
        total += w;
    }
    for (double& w : k.taps) w /= total;
    return k;
}

int reflect_index(int i, int n) noexcept {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

Image2D convolve_separable(const Image2D& img, std::span<const double> taps) {
    if (taps.empty() || taps.size() % 2 == 0) throw ParameterError("kernel length must be odd");
    const int h = img.height();
    const int w = img.width();
    const int r = static_cast<int>(taps.size() / 2);

    // Precomputed reflected offsets keep the inner loops branch-free.
    std::vector<int> col_idx(static_cast<std::size_t>(w) * taps.size());
    for (int c = 0; c < w; ++c)
        for (int k = -r; k <= r; ++k)
            col_idx[static_cast<std::size_t>(c) * taps.size() + (k + r)] = reflect_index(c + k, w);
    std::vector<int> row_idx(static_cast<std::size_t>(h) * taps.size());
    for (int y = 0; y < h; ++y)
        for (int k = -r; k <= r; ++k)
            row_idx[static_cast<std::size_t>(y) * taps.size() + (k + r)] = reflect_index(y + k, h);

    Image2D tmp(h, w);
    const double* src = img.pixels().data();
    double* mid = tmp.pixels().data();
    const std::size_t nt = taps.size();

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const double* row = src + static_cast<std::size_t>(y) * w;
        double* out = mid + static_cast<std::size_t>(y) * w;
        for (int c = 0; c < w; ++c) {
            const int* idx = &col_idx[static_cast<std::size_t>(c) * nt];
            double acc = 0.0;
            for (std::size_t k = 0; k < nt; ++k) acc += taps[k] * row[idx[k]];
            out[c] = acc;
        }
    }

    Image2D result(h, w);
    double* dst = result.pixels().data();
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const int* idx = &row_idx[static_cast<std::size_t>(y) * nt];
        double* out = dst + static_cast<std::size_t>(y) * w;
        for (int c = 0; c < w; ++c) out[c] = 0.0;
        for (std::size_t k = 0; k < nt; ++k) {
            const double t = taps[k];
            const double* in = mid + static_cast<std::size_t>(idx[k]) * w;
            for (int c = 0; c < w; ++c) out[c] += t * in[c];
        }
    }
    return result;
}

Image2D gaussian_convolve(const Image2D& img, double sigma) {
    return gaussian_convolve(img, make_gaussian_kernel(sigma));
}

Image2D gaussian_convolve(const Image2D& img, const GaussianKernel& kernel) {
    return convolve_separable(img, kernel.taps);
}

Image2D sobel_magnitude(const Image2D& img) {
    const int h = img.height();
    const int w = img.width();
    Image2D out(h, w);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const int ym = reflect_index(y - 1, h);
        const int yp = reflect_index(y + 1, h);
        for (int x = 0; x < w; ++x) {
            const int xm = reflect_index(x - 1, w);
            const int xp = reflect_index(x + 1, w);
            const double gx = (img(ym, xp) + 2.0 * img(y, xp) + img(yp, xp)) -
                              (img(ym, xm) + 2.0 * img(y, xm) + img(yp, xm));
            const double gy = (img(yp, xm) + 2.0 * img(yp, x) + img(yp, xp)) -
                              (img(ym, xm) + 2.0 * img(ym, x) + img(ym, xp));
            out(y, x) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

namespace {

struct Tap {
    int i0;
    int i1;
    double frac;
};

std::vector<Tap> bilinear_taps(int in, int out) {
    std::vector<Tap> taps(static_cast<std::size_t>(out));
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (int o = 0; o < out; ++o) {
        double src = (o + 0.5) * scale - 0.5;
        src = std::clamp(src, 0.0, static_cast<double>(in - 1));
        const int i0 = static_cast<int>(std::floor(src));
        const int i1 = std::min(i0 + 1, in - 1);
        taps[static_cast<std::size_t>(o)] = {i0, i1, src - i0};
    }
    return taps;
}

}  // namespace

Image2D resize(const Image2D& img, int out_height, int out_width) {
    if (out_height < 1 || out_width < 1) throw ParameterError("resize target must be >= 1");
    if (out_height == img.height() && out_width == img.width()) {
        Image2D copy = img;
        copy.set_type(PixelType::Float);
        return copy;
    }
    const auto ry = bilinear_taps(img.height(), out_height);
    const auto rx = bilinear_taps(img.width(), out_width);
    Image2D out(out_height, out_width);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < out_height; ++y) {
        const Tap ty = ry[static_cast<std::size_t>(y)];
        for (int x = 0; x < out_width; ++x) {
            const Tap tx = rx[static_cast<std::size_t>(x)];
            const double top = img(ty.i0, tx.i0) * (1.0 - tx.frac) + img(ty.i0, tx.i1) * tx.frac;
            const double bot = img(ty.i1, tx.i0) * (1.0 - tx.frac) + img(ty.i1, tx.i1) * tx.frac;
            out(y, x) = top * (1.0 - ty.frac) + bot * ty.frac;
        }
    }
    return out;
}

Image2D to_uint8(const Image2D& img) {
    Image2D out = img;
    for (double& v : out.pixels()) v = std::nearbyint(std::clamp(v, 0.0, 255.0));
    out.set_type(PixelType::UInt8);
    return out;
}

double otsu_threshold(const Image2D& img) {
    constexpr int kBins = 256;
    const double lo = img.min();
    const double hi = img.max();
    if (!(hi > lo)) throw DegenerateInputError("otsu threshold of a constant image");

    std::array<double, kBins> count{};
    std::array<double, kBins> sum{};
    std::array<double, kBins> bin_min;
    std::array<double, kBins> bin_max;
    bin_min.fill(std::numeric_limits<double>::infinity());
    bin_max.fill(-std::numeric_limits<double>::infinity());

    const double scale = kBins / (hi - lo);
    for (double v : img.pixels()) {
        const int b = std::min(kBins - 1, static_cast<int>(std::floor((v - lo) * scale)));
        count[b] += 1.0;
        sum[b] += v;
        bin_min[b] = std::min(bin_min[b], v);
        bin_max[b] = std::max(bin_max[b], v);
    }

    const double n_total = static_cast<double>(img.size());
    double s_total = 0.0;
    for (double s : sum) s_total += s;

    // Between-class variance up to the constant factor 1/N^2:
    // (N*S0 - n0*S)^2 / (n0*n1).
    double best = -1.0;
    int best_bin = -1;
    double n0 = 0.0;
    double s0 = 0.0;
    for (int t = 0; t < kBins - 1; ++t) {
        n0 += count[t];
        s0 += sum[t];
        const double n1 = n_total - n0;
        if (n0 == 0.0 || n1 == 0.0) continue;
        const double d = n_total * s0 - n0 * s_total;
        const double score = d * d / (n0 * n1);
        if (score > best) {
            best = score;
            best_bin = t;
        }
    }

    double lower_max = -std::numeric_limits<double>::infinity();
    for (int b = 0; b <= best_bin; ++b) lower_max = std::max(lower_max, bin_max[b]);
    double upper_min = std::numeric_limits<double>::infinity();
    for (int b = best_bin + 1; b < kBins; ++b) upper_min = std::min(upper_min, bin_min[b]);
    return 0.5 * (lower_max + upper_min);
}

}  // namespace hcs
