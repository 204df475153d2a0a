#pragma once
// Synthetic fluorescence fixtures: single-cell patches in the style of
// high-resolution confocal references, and multi-cell fields for ingestion.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hcs/manifest.hpp"
#include "hcs/patch.hpp"

namespace hcs {

struct CellStyle {
    int size = 128;
    int min_filaments = 70;
    int max_filaments = 110;
    /// Scales the filament count; drug fixtures use < 1 for depolymerizers.
    double filament_scale = 1.0;
    double nucleus_radius_lo = 16.0;
    double nucleus_radius_hi = 22.0;
};

/// One cell centred in a `style.size` square: an elliptical nucleus and a
/// network of curved filaments radiating from it over dim cytoplasm.
/// Values are on the 0..255 scale, unbinned.
ImagePatch synth_cell(std::uint64_t seed, const CellStyle& style = {});

struct SynthField {
    Image2D nucleus;
    Image2D tubule;
    std::vector<std::pair<int, int>> centres;  // (row, col)
};

/// A field of `cells` non-overlapping cells, binned to uint8.
SynthField synth_field(std::uint64_t seed, int height, int width, int cells,
                       const CellStyle& style = {});

struct FixtureOptions {
    int patches = 16;
    std::uint64_t seed = 0;
    CellStyle style;
    std::string id_prefix = "syn";
    /// Optional drug labelling: patches are spread round-robin over these
    /// (compound, concentration, mechanism, filament_scale) tuples.
    struct Treatment {
        std::string compound;
        std::string concentration;
        std::string mechanism;
        double filament_scale = 1.0;
    };
    std::vector<Treatment> treatments;
};

/// Writes binned patches plus manifest.csv under `out_dir`; every patch is
/// assigned to the train split.
DatasetManifest write_fixture_dataset(const std::filesystem::path& out_dir, const FixtureOptions& options);

}  // namespace hcs
