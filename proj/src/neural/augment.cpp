#include "hcs/neural/augment.hpp"

#include <random>

#include "hcs/errors.hpp"
#include "hcs/kernels.hpp"

namespace hcs::neural {

namespace {

Image2D unit_range(const Image2D& img) {
    Image2D out(img.height(), img.width());
    for (std::size_t i = 0; i < img.size(); ++i) out.pixels()[i] = to_unit_range(img.pixels()[i]);
    return out;
}

Image2D resized(const Image2D& img, int side) {
    if (img.height() == side && img.width() == side) return img;
    return resize(img, side, side);
}

}  // namespace

ImagePatch augment(const ImagePatch& patch, int target_side, int crop, const Rng& rng) {
    if (crop < 1 || target_side < 1) throw ParameterError("crop and target side must be >= 1");
    if (crop > target_side) throw ParameterError("crop exceeds the target side");
    const Image2D nucleus = resized(patch.nucleus, target_side);
    const Image2D tubule = resized(patch.tubule, target_side);
    int row0 = 0;
    int col0 = 0;
    if (crop < target_side) {
        auto engine = rng.engine();
        std::uniform_int_distribution<int> offset(0, target_side - crop);
        row0 = offset(engine);
        col0 = offset(engine);
    }
    return {unit_range(nucleus.crop(row0, col0, crop, crop)), unit_range(tubule.crop(row0, col0, crop, crop)),
            patch.meta};
}

ImagePatch normalize_full(const ImagePatch& patch, int target_side) {
    return {unit_range(resized(patch.nucleus, target_side)), unit_range(resized(patch.tubule, target_side)),
            patch.meta};
}

torch::Tensor to_tensor(const std::vector<ImagePatch>& patches, torch::Dtype dtype) {
    if (patches.empty()) throw ShapeError("cannot stack an empty batch");
    const int h = patches.front().tubule.height();
    const int w = patches.front().tubule.width();
    auto out = torch::empty({static_cast<long>(patches.size()), 2, h, w}, torch::kFloat64);
    auto acc = out.accessor<double, 4>();
    for (std::size_t n = 0; n < patches.size(); ++n) {
        const auto& p = patches[n];
        if (p.tubule.height() != h || p.tubule.width() != w || !p.nucleus.same_shape(p.tubule))
            throw ShapeError("batch patches differ in shape");
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                acc[static_cast<long>(n)][0][y][x] = p.nucleus(y, x);
                acc[static_cast<long>(n)][1][y][x] = p.tubule(y, x);
            }
    }
    return out.to(dtype);
}

ImagePatch from_tensor(const torch::Tensor& batch, int index) {
    if (batch.dim() != 4 || batch.size(1) != 2) throw ShapeError("expected a [N, 2, H, W] tensor");
    const auto t = batch[index].detach().to(torch::kCPU, torch::kFloat64).contiguous();
    const int h = static_cast<int>(t.size(1));
    const int w = static_cast<int>(t.size(2));
    auto acc = t.accessor<double, 3>();
    ImagePatch p{Image2D(h, w), Image2D(h, w), {}};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            p.nucleus(y, x) = acc[0][y][x];
            p.tubule(y, x) = acc[1][y][x];
        }
    return p;
}

}  // namespace hcs::neural
