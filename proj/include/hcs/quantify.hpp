#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hcs/image.hpp"
#include "hcs/patch.hpp"

namespace hcs {

/// Per-cell perinuclear microtubule density.
struct DensityRecord {
    std::string patch_id;
    std::string compound;
    std::string concentration;
    std::string mechanism;
    long ring_px = 0;
    long seg_px = 0;
    double density = 0.0;  // seg_px / ring_px
};

/// tubule > otsu(tubule) on the enhanced tubule channel.
BinaryMask segment_microtubules(const ImagePatch& enhanced);

/// Nucleus mask used for the perinuclear ring: Otsu on the nucleus channel.
BinaryMask segment_nucleus(const ImagePatch& patch);

/// Pixels within Euclidean distance `radius_px` of the nucleus, excluding the
/// nucleus itself, clipped to the frame.
BinaryMask perinuclear_ring(const BinaryMask& nucleus_mask, int radius_px = 8);

/// Fraction of ring pixels covered by the tubule mask. Only ring_px, seg_px
/// and density are filled in. Throws DegenerateInputError on an empty nucleus
/// or empty ring, ShapeError on mismatched masks.
DensityRecord perinuclear_density(const BinaryMask& tubule_mask, const BinaryMask& nucleus_mask,
                                  int radius_px = 8);

/// Segments the tubule channel and measures density around the nucleus;
/// metadata is copied from the patch. The nucleus channel is resized to the
/// tubule grid when they differ.
DensityRecord measure_patch(const ImagePatch& enhanced, int radius_px = 8);

void write_density_csv(const std::filesystem::path& path, const std::vector<DensityRecord>& records);
std::vector<DensityRecord> read_density_csv(const std::filesystem::path& path);

struct DoseResponseRow {
    std::string compound;
    std::string concentration;
    std::string mechanism;
    std::size_t n_available = 0;
    std::size_t n_used = 0;
    double mean_density = 0.0;
};

struct DoseResponse {
    std::vector<DoseResponseRow> rows;  // sorted by compound, then concentration value
    double baseline_mean = 0.0;
    std::size_t baseline_n = 0;
    std::vector<std::string> warnings;
};

struct DoseResponseOptions {
    std::size_t per_combo_n = 200;
    std::size_t baseline_n = 1000;
    std::uint64_t seed = 0;
    /// Combinations that must be present, as (compound, concentration).
    std::vector<std::pair<std::string, std::string>> declared;
};

/// Mean density over a seeded random sample (without replacement) of
/// `per_combo_n` cells per (compound, concentration); the untreated baseline
/// is the mean over `baseline_n` sampled baseline records. Combinations with
/// fewer cells use all of them and add a warning.
DoseResponse dose_response(const std::vector<DensityRecord>& records,
                           const std::vector<DensityRecord>& baseline_records,
                           const DoseResponseOptions& options);

void write_dose_response_csv(const std::filesystem::path& path, const DoseResponse& table);

/// One PNG per mechanism group: mean density against log concentration, one
/// polyline per compound, untreated baseline as a dashed line. Returns the
/// files written.
std::vector<std::filesystem::path> plot_dose_response(const std::filesystem::path& out_dir,
                                                      const DoseResponse& table);

}  // namespace hcs
