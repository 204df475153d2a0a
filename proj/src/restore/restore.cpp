#include "hcs/restore.hpp"

#include "hcs/errors.hpp"
#include "hcs/kernels.hpp"

namespace hcs {

Image2D richardson_lucy(const Image2D& img, double psf_sigma, int iterations) {
    if (iterations < 1) throw ParameterError("richardson-lucy needs at least one iteration");
    for (double v : img.pixels())
        if (v < 0.0) throw DegenerateInputError("richardson-lucy input has negative pixels");
    const auto psf = make_gaussian_kernel(psf_sigma);
    constexpr double eps = 1e-12;

    const auto observed = img.pixels();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(img.size());
    Image2D estimate(img.height(), img.width(), img.mean());
    Image2D ratio(img.height(), img.width());
    for (int it = 0; it < iterations; ++it) {
        const Image2D blurred = gaussian_convolve(estimate, psf);
        const double* b = blurred.pixels().data();
        double* q = ratio.pixels().data();
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) q[i] = b[i] < eps ? 0.0 : observed[i] / b[i];

        // The Gaussian PSF is symmetric, so K^T is the same correlation.
        const Image2D correction = gaussian_convolve(ratio, psf);
        const double* c = correction.pixels().data();
        double* x = estimate.pixels().data();
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) x[i] *= c[i];
    }
    return estimate;
}

BinaryMask sobel_otsu_segment(const Image2D& img) {
    const Image2D edges = sobel_magnitude(img);
    return threshold_above(edges, otsu_threshold(edges));
}

}  // namespace hcs
