#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hcs::oracle {

Image2D random_image(std::mt19937_64& rng, int h, int w, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Image2D img(h, w);
    for (double& v : img.pixels()) v = u(rng);
    return img;
}

Image2D random_uint8_image(std::mt19937_64& rng, int h, int w, int lo, int hi) {
    std::uniform_int_distribution<int> u(lo, hi);
    Image2D img(h, w, 0.0, PixelType::UInt8);
    for (double& v : img.pixels()) v = u(rng);
    return img;
}

int reflect(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
    }
    return i;
}

std::vector<double> gaussian_taps(double sigma, int radius) {
    std::vector<double> t;
    double z = 0.0;
    for (int d = -radius; d <= radius; ++d) {
        t.push_back(std::exp(-(d * d) / (2.0 * sigma * sigma)));
        z += t.back();
    }
    for (double& v : t) v /= z;
    return t;
}

Image2D gaussian_direct(const Image2D& img, double sigma) {
    const int r = static_cast<int>(std::ceil(4.0 * sigma));
    // 2-D weights evaluated pointwise, normalized over the full square.
    std::vector<double> w2;
    double z = 0.0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            w2.push_back(std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)));
            z += w2.back();
        }
    Image2D out(img.height(), img.width());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0.0;
            std::size_t k = 0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx, ++k)
                    acc += w2[k] * img(reflect(y + dy, img.height()), reflect(x + dx, img.width()));
            out(y, x) = acc / z;
        }
    return out;
}

Image2D bilinear(const Image2D& img, int out_h, int out_w) {
    Image2D out(out_h, out_w);
    auto coord = [](int o, int in, int out_n) {
        double s = (o + 0.5) * in / out_n - 0.5;
        return std::min(std::max(s, 0.0), double(in - 1));
    };
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x) {
            const double sy = coord(y, img.height(), out_h);
            const double sx = coord(x, img.width(), out_w);
            const int y0 = int(sy), x0 = int(sx);
            const int y1 = std::min(y0 + 1, img.height() - 1), x1 = std::min(x0 + 1, img.width() - 1);
            const double fy = sy - y0, fx = sx - x0;
            out(y, x) = img(y0, x0) * (1 - fy) * (1 - fx) + img(y0, x1) * (1 - fy) * fx +
                        img(y1, x0) * fy * (1 - fx) + img(y1, x1) * fy * fx;
        }
    return out;
}

double round_uint8(double v) {
    v = std::min(255.0, std::max(0.0, v));
    const double f = std::floor(v);
    const double diff = v - f;
    if (diff > 0.5) return f + 1;
    if (diff < 0.5) return f;
    return std::fmod(f, 2.0) == 0.0 ? f : f + 1;
}

int otsu_sweep_uint8(const Image2D& img) {
    std::int64_t hist[256] = {};
    for (double v : img.pixels()) ++hist[static_cast<int>(v)];
    std::int64_t n = 0, s = 0;
    for (int v = 0; v < 256; ++v) {
        n += hist[v];
        s += hist[v] * v;
    }
    // Between-class variance ~ (n*s0 - n0*s)^2 / (n0*n1), compared exactly.
    __int128 best_num = -1;
    __int128 best_den = 1;
    int best_t = -1;
    std::int64_t n0 = 0, s0 = 0;
    for (int t = 0; t < 255; ++t) {
        n0 += hist[t];
        s0 += hist[t] * t;
        const std::int64_t n1 = n - n0;
        if (n0 == 0 || n1 == 0) continue;
        const __int128 d = static_cast<__int128>(n) * s0 - static_cast<__int128>(n0) * s;
        const __int128 num = d * d;
        const __int128 den = static_cast<__int128>(n0) * n1;
        if (best_t < 0 || num * best_den > best_num * den) {
            best_num = num;
            best_den = den;
            best_t = t;
        }
    }
    return best_t;
}

SsimWindowStats ssim_windows(const Image2D& a, const Image2D& b, int window, double sigma) {
    const int r = window / 2;
    std::vector<double> w(static_cast<std::size_t>(window * window));
    double z = 0.0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const double v = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
            w[static_cast<std::size_t>((dy + r) * window + dx + r)] = v;
            z += v;
        }
    for (double& v : w) v /= z;
    const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
    double sum_s = 0.0, sum_cs = 0.0;
    int count = 0;
    for (int y0 = 0; y0 + window <= a.height(); ++y0)
        for (int x0 = 0; x0 + window <= a.width(); ++x0) {
            double ma = 0, mb = 0;
            for (int i = 0; i < window; ++i)
                for (int j = 0; j < window; ++j) {
                    const double k = w[static_cast<std::size_t>(i * window + j)];
                    ma += k * a(y0 + i, x0 + j);
                    mb += k * b(y0 + i, x0 + j);
                }
            double va = 0, vb = 0, cov = 0;
            for (int i = 0; i < window; ++i)
                for (int j = 0; j < window; ++j) {
                    const double k = w[static_cast<std::size_t>(i * window + j)];
                    const double da = a(y0 + i, x0 + j) - ma, db = b(y0 + i, x0 + j) - mb;
                    va += k * da * da;
                    vb += k * db * db;
                    cov += k * da * db;
                }
            const double l = (2 * ma * mb + c1) / (ma * ma + mb * mb + c1);
            const double cs = (2 * cov + c2) / (va + vb + c2);
            sum_s += l * cs;
            sum_cs += cs;
            ++count;
        }
    return {sum_s / count, sum_cs / count};
}

double msssim_scales(const Image2D& a, const Image2D& b, int scales) {
    const double weights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
    double wsum = 0.0;
    for (int s = 0; s < scales; ++s) wsum += weights[s];
    Image2D x = a, y = b;
    double out = 1.0;
    for (int s = 0; s < scales; ++s) {
        const auto st = ssim_windows(x, y);
        const double term = s == scales - 1 ? st.ssim : st.cs;
        out *= std::pow(std::max(0.0, term), weights[s] / wsum);
        Image2D px(x.height() / 2, x.width() / 2), py(y.height() / 2, y.width() / 2);
        for (int i = 0; i < px.height(); ++i)
            for (int j = 0; j < px.width(); ++j) {
                px(i, j) = (x(2 * i, 2 * j) + x(2 * i + 1, 2 * j) + x(2 * i, 2 * j + 1) + x(2 * i + 1, 2 * j + 1)) / 4;
                py(i, j) = (y(2 * i, 2 * j) + y(2 * i + 1, 2 * j) + y(2 * i, 2 * j + 1) + y(2 * i + 1, 2 * j + 1)) / 4;
            }
        x = px;
        y = py;
    }
    return out;
}

double auc_pairwise(const Image2D& gt, const Image2D& score) {
    double mean = 0.0;
    for (double v : gt.pixels()) mean += v;
    mean /= static_cast<double>(gt.size());
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < gt.size(); ++i) (gt.pixels()[i] > mean ? pos : neg).push_back(score.pixels()[i]);
    double wins = 0.0;
    for (double p : pos)
        for (double q : neg) wins += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

BinaryMask ring_bruteforce(const BinaryMask& nucleus, int radius) {
    BinaryMask ring(nucleus.height(), nucleus.width());
    std::vector<std::pair<int, int>> pts;
    for (int y = 0; y < nucleus.height(); ++y)
        for (int x = 0; x < nucleus.width(); ++x)
            if (nucleus(y, x)) pts.emplace_back(y, x);
    for (int y = 0; y < nucleus.height(); ++y)
        for (int x = 0; x < nucleus.width(); ++x) {
            if (nucleus(y, x)) continue;
            for (const auto& [py, px] : pts)
                if ((py - y) * (py - y) + (px - x) * (px - x) <= radius * radius) {
                    ring.set(y, x, true);
                    break;
                }
        }
    return ring;
}

double correlation(const Image2D& a, const Image2D& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a.pixels()[i];
        mb += b.pixels()[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a.pixels()[i] - ma, db = b.pixels()[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    return sab / std::sqrt(saa * sbb);
}

BinaryMask disk_mask(int h, int w, double cy, double cx, double r) {
    BinaryMask m(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) m.set(y, x, (y - cy) * (y - cy) + (x - cx) * (x - cx) <= r * r);
    return m;
}

Image2D disk_image(int h, int w, double cy, double cx, double r, double inside, double outside) {
    Image2D img(h, w, outside);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if ((y - cy) * (y - cy) + (x - cx) * (x - cx) <= r * r) img(y, x) = inside;
    return img;
}

}  // namespace hcs::oracle
