#include "hcs/serial_kernels.hpp"

#include <cmath>

#include "hcs/errors.hpp"

namespace hcs::serial {

Image2D gaussian_convolve(const Image2D& img, double sigma) {
    return serial::gaussian_convolve(img, make_gaussian_kernel(sigma));
}

Image2D gaussian_convolve(const Image2D& img, const GaussianKernel& kernel) {
    const int h = img.height();
    const int w = img.width();
    const int r = kernel.radius;
    Image2D out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx)
                    acc += kernel.weight(dy, dx) *
                           img(reflect_index(y + dy, h), reflect_index(x + dx, w));
            out(y, x) = acc;
        }
    }
    return out;
}

Image2D sobel_magnitude(const Image2D& img) {
    static constexpr int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    static constexpr int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    const int h = img.height();
    const int w = img.width();
    Image2D out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double gx = 0.0;
            double gy = 0.0;
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    const double v = img(reflect_index(y + i - 1, h), reflect_index(x + j - 1, w));
                    gx += kx[i][j] * v;
                    gy += ky[i][j] * v;
                }
            }
            out(y, x) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

Image2D richardson_lucy(const Image2D& img, double psf_sigma, int iterations) {
    if (iterations < 1) throw ParameterError("richardson-lucy needs at least one iteration");
    for (double v : img.pixels())
        if (v < 0.0) throw DegenerateInputError("richardson-lucy input has negative pixels");
    const auto psf = make_gaussian_kernel(psf_sigma);
    constexpr double eps = 1e-12;

    Image2D estimate(img.height(), img.width(), img.mean());
    for (int it = 0; it < iterations; ++it) {
        Image2D blurred = serial::gaussian_convolve(estimate, psf);
        Image2D ratio(img.height(), img.width());
        for (std::size_t i = 0; i < img.size(); ++i) {
            const double b = blurred.pixels()[i];
            ratio.pixels()[i] = b < eps ? 0.0 : img.pixels()[i] / b;
        }
        // Symmetric PSF: the adjoint is the same correlation.
        const Image2D correction = serial::gaussian_convolve(ratio, psf);
        for (std::size_t i = 0; i < img.size(); ++i) estimate.pixels()[i] *= correction.pixels()[i];
    }
    return estimate;
}

}  // namespace hcs::serial
