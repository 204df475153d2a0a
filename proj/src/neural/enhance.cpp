#include "hcs/neural/enhance.hpp"

#include "hcs/errors.hpp"
#include "hcs/kernels.hpp"
#include "hcs/neural/augment.hpp"
#include "hcs/neural/trainer.hpp"

namespace hcs::neural {

Enhancer::Enhancer(Generator generator, int side) : generator_(std::move(generator)), side_(side) {
    if (side_ < 8 || side_ % kGeneratorStride != 0)
        throw ShapeError("enhancement side must be a multiple of 4 and >= 8");
    generator_->eval();
}

Enhancer Enhancer::from_checkpoint(const std::filesystem::path& path) {
    const CheckpointHeader header = read_checkpoint_header(path);
    if (header.kind == ModelKind::CycleGan) {
        CycleGan model = CycleGan::load(path);
        return Enhancer(model.g_ab, header.config.load_side);
    }
    Pix2Pix model = Pix2Pix::load(path);
    return Enhancer(model.g, header.config.load_side);
}

std::vector<ImagePatch> Enhancer::enhance(const std::vector<ImagePatch>& patches, int batch_size) const {
    if (batch_size < 1) throw ParameterError("batch size must be >= 1");
    torch::NoGradGuard no_grad;
    std::vector<ImagePatch> out;
    out.reserve(patches.size());
    for (std::size_t start = 0; start < patches.size(); start += static_cast<std::size_t>(batch_size)) {
        const std::size_t end = std::min(patches.size(), start + static_cast<std::size_t>(batch_size));
        std::vector<ImagePatch> batch;
        for (std::size_t i = start; i < end; ++i) {
            validate_patch(patches[i]);
            batch.push_back(normalize_full(patches[i], side_));
        }
        const torch::Tensor y = generator_->forward(to_tensor(batch));
        for (std::size_t i = start; i < end; ++i) {
            ImagePatch p = from_tensor(y, static_cast<int>(i - start));
            for (double& v : p.nucleus.pixels()) v = from_unit_range(v);
            for (double& v : p.tubule.pixels()) v = from_unit_range(v);
            p.nucleus = to_uint8(p.nucleus);
            p.tubule = to_uint8(p.tubule);
            p.meta = patches[i].meta;
            out.push_back(std::move(p));
        }
    }
    return out;
}

ImagePatch Enhancer::enhance(const ImagePatch& patch) const { return enhance(std::vector<ImagePatch>{patch}).front(); }

ImagePatch enhance(const ImagePatch& patch, const std::filesystem::path& checkpoint) {
    return Enhancer::from_checkpoint(checkpoint).enhance(patch);
}

}  // namespace hcs::neural
