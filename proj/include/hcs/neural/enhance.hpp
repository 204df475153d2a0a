#pragma once

#include <filesystem>
#include <vector>

#include "hcs/neural/networks.hpp"
#include "hcs/patch.hpp"

namespace hcs::neural {

/// Source-to-target inference: resize to the training side, map to [-1, 1],
/// run the generator, map back to [0, 255] and bin to uint8. No randomness.
class Enhancer {
public:
    Enhancer(Generator generator, int side);

    /// Loads G_ab from a CycleGAN checkpoint or G from a pix2pix checkpoint.
    static Enhancer from_checkpoint(const std::filesystem::path& path);

    [[nodiscard]] ImagePatch enhance(const ImagePatch& patch) const;
    /// Batched form of enhance; output order follows the input.
    [[nodiscard]] std::vector<ImagePatch> enhance(const std::vector<ImagePatch>& patches, int batch_size = 8) const;

    [[nodiscard]] int side() const noexcept { return side_; }

private:
    mutable Generator generator_;
    int side_;
};

ImagePatch enhance(const ImagePatch& patch, const std::filesystem::path& checkpoint);

}  // namespace hcs::neural
