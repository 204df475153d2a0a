#pragma once

#include <vector>

#include <torch/torch.h>

#include "hcs/patch.hpp"
#include "hcs/rng.hpp"

namespace hcs::neural {

/// [0, 255] -> [-1, 1] and back.
inline double to_unit_range(double v) { return v / 127.5 - 1.0; }
inline double from_unit_range(double v) { return (v + 1.0) * 127.5; }

/// Resize both channels to target_side (skipped when already there), cut one
/// crop x crop window at the same offset in both channels and map values to
/// [-1, 1]. The window offset is drawn from `rng`; when crop == target_side no
/// draw is made. Throws ParameterError when crop > target_side.
ImagePatch augment(const ImagePatch& patch, int target_side, int crop, const Rng& rng);

/// Resize to target_side and map to [-1, 1] without cropping.
ImagePatch normalize_full(const ImagePatch& patch, int target_side);

/// Stacks patches as a float tensor [N, 2, H, W] (nucleus, tubule).
torch::Tensor to_tensor(const std::vector<ImagePatch>& patches, torch::Dtype dtype = torch::kFloat32);

/// Inverse of to_tensor for one batch item; values are copied unchanged.
ImagePatch from_tensor(const torch::Tensor& batch, int index);

}  // namespace hcs::neural
