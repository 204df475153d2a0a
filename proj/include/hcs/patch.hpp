#pragma once

#include <optional>
#include <string>

#include "hcs/image.hpp"

namespace hcs {

struct PatchMeta {
    std::string source_image_id;
    int cell_index = 0;
    std::string well;
    std::string compound;
    std::string concentration;  // kept as given in the screen annotation
    std::string mechanism;

    /// "<source_image_id>_<cell_index>", unique within a dataset.
    [[nodiscard]] std::string patch_id() const {
        return source_image_id + "_" + std::to_string(cell_index);
    }

    friend bool operator==(const PatchMeta&, const PatchMeta&) = default;
};

/// Two-channel single-cell patch (nucleus + microtubule), both square and
/// of identical shape.
struct ImagePatch {
    Image2D nucleus;
    Image2D tubule;
    PatchMeta meta;

    [[nodiscard]] int size_px() const noexcept { return tubule.height(); }
};

/// Throws ShapeError if the channels differ in shape or are not square,
/// DataError if the source id is empty.
void validate_patch(const ImagePatch& patch);

}  // namespace hcs
