#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hcs/patch.hpp"

namespace hcs {

enum class SplitTag { Train, Val, Test, None };

std::string to_string(SplitTag tag);
SplitTag parse_split_tag(const std::string& text);

struct ManifestEntry {
    std::string patch_path;  // stem relative to the manifest directory
    PatchMeta meta;
    SplitTag split = SplitTag::None;
    std::string degradation_case;  // only set for simulated datasets
};

/// One dataset directory: manifest.csv plus `<patch_path>_nucleus.png` and
/// `<patch_path>_tubule.png` per entry.
struct DatasetManifest {
    std::filesystem::path root;
    std::vector<ManifestEntry> entries;
    int patch_size = 0;
    bool has_degradation_column = false;

    [[nodiscard]] std::filesystem::path nucleus_file(const ManifestEntry& e) const;
    [[nodiscard]] std::filesystem::path tubule_file(const ManifestEntry& e) const;

    /// Entries whose split tag matches; root and patch size are kept.
    [[nodiscard]] DatasetManifest filter(SplitTag tag) const;
    [[nodiscard]] const ManifestEntry* find(const std::string& patch_id) const;
};

inline constexpr const char* kManifestFile = "manifest.csv";

/// Writes `<root>/manifest.csv`. Entries are emitted sorted by
/// (source_image_id, cell_index) so identical datasets give identical bytes.
void write_manifest(const DatasetManifest& manifest);

/// Loads a manifest file (or a directory containing manifest.csv). Verifies
/// that every referenced patch file exists and that patch sizes agree.
DatasetManifest read_manifest(const std::filesystem::path& path, bool verify_files = true);

ImagePatch load_patch(const DatasetManifest& manifest, const ManifestEntry& entry);
std::vector<ImagePatch> load_patches(const DatasetManifest& manifest);

/// Stores both channels under `root` and returns the entry stem.
std::string save_patch(const std::filesystem::path& root, const ImagePatch& patch);

}  // namespace hcs
