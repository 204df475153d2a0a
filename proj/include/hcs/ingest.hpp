#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hcs/manifest.hpp"
#include "hcs/patch.hpp"

namespace hcs {

struct ExtractOptions {
    int patch_size = 128;
    long min_nucleus_area = 50;  // post-Otsu speckle floor, pixels
};

/// Segments nuclei (Otsu on the nucleus channel, 8-connected components of at
/// least `min_nucleus_area` pixels) and crops a patch_size x patch_size window
/// centred on each rounded centroid. Windows that leave the image are dropped.
/// A nucleus channel without any qualifying component yields an empty list.
std::vector<ImagePatch> extract_patches(const Image2D& nucleus_img, const Image2D& tubule_img,
                                        const ExtractOptions& options,
                                        const PatchMeta& image_meta = {});

inline std::vector<ImagePatch> extract_patches(const Image2D& nucleus_img,
                                               const Image2D& tubule_img, int patch_size) {
    return extract_patches(nucleus_img, tubule_img, ExtractOptions{patch_size, 50},
                           PatchMeta{"image", 0, {}, {}, {}, {}});
}

struct DatasetSplit {
    std::vector<std::string> train;
    std::vector<std::string> val;
    std::vector<std::string> test;
};

/// Seeded partition of raw-image ids. Sizes: round(r0*n), round(r1*n), rest.
DatasetSplit split_dataset(const std::vector<std::string>& raw_image_ids,
                           const std::array<double, 3>& ratios, std::uint64_t seed);

/// Tags every entry with the split of its source image.
void apply_split(DatasetManifest& manifest, const DatasetSplit& split);

/// Mean segmented nucleus area of each list; returns sqrt(area_a / area_b).
/// Patches whose nucleus channel is constant or segments empty are skipped.
double compute_magnification(const std::vector<ImagePatch>& nucleus_patches_a,
                             const std::vector<ImagePatch>& nucleus_patches_b);

/// Patch side in domain B matching `base_side` in domain A: floor(base / factor).
int matched_patch_side(int base_side, double magnification);

struct IngestOptions {
    std::string nucleus_suffix = "_nucleus.png";
    std::string tubule_suffix = "_tubule.png";
    ExtractOptions extract;
    int downsample = 1;  // integer factor applied to raw images before extraction
    /// Optional per-image annotations keyed by source image id.
    std::map<std::string, PatchMeta> annotations;
};

/// Scans `input_dir` for channel pairs, extracts patches from every raw image
/// (parallel over images, merged in sorted id order) and writes the dataset
/// with its manifest under `out_dir`.
DatasetManifest ingest_directory(const std::filesystem::path& input_dir,
                                 const std::filesystem::path& out_dir,
                                 const IngestOptions& options);

/// Reads image_id,well,compound,concentration,mechanism annotations.
std::map<std::string, PatchMeta> read_annotations(const std::filesystem::path& csv);

}  // namespace hcs
