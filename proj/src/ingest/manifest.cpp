#include "hcs/manifest.hpp"

#include <algorithm>
#include <set>

#include "hcs/csv.hpp"
#include "hcs/errors.hpp"
#include "hcs/png_io.hpp"

namespace hcs {
namespace fs = std::filesystem;

namespace {

const CsvRow kHeader = {"patch_path", "source_image_id", "cell_index", "well",
                        "compound",   "concentration",   "mechanism",  "split"};

bool entry_less(const ManifestEntry& a, const ManifestEntry& b) {
    if (a.meta.source_image_id != b.meta.source_image_id)
        return a.meta.source_image_id < b.meta.source_image_id;
    return a.meta.cell_index < b.meta.cell_index;
}

}  // namespace

void validate_patch(const ImagePatch& patch) {
    if (patch.nucleus.empty() || !patch.nucleus.same_shape(patch.tubule))
        throw ShapeError("patch channels differ in shape");
    if (patch.tubule.height() != patch.tubule.width()) throw ShapeError("patch is not square");
    if (patch.meta.source_image_id.empty()) throw DataError("patch without source image id");
}

std::string to_string(SplitTag tag) {
    switch (tag) {
        case SplitTag::Train: return "train";
        case SplitTag::Val: return "val";
        case SplitTag::Test: return "test";
        case SplitTag::None: return "none";
    }
    return "none";
}

SplitTag parse_split_tag(const std::string& text) {
    if (text == "train") return SplitTag::Train;
    if (text == "val") return SplitTag::Val;
    if (text == "test") return SplitTag::Test;
    if (text == "none" || text.empty()) return SplitTag::None;
    throw DataError("unknown split tag '" + text + "'");
}

fs::path DatasetManifest::nucleus_file(const ManifestEntry& e) const {
    return root / (e.patch_path + "_nucleus.png");
}

fs::path DatasetManifest::tubule_file(const ManifestEntry& e) const {
    return root / (e.patch_path + "_tubule.png");
}

DatasetManifest DatasetManifest::filter(SplitTag tag) const {
    DatasetManifest out = *this;
    out.entries.clear();
    for (const auto& e : entries)
        if (e.split == tag) out.entries.push_back(e);
    return out;
}

const ManifestEntry* DatasetManifest::find(const std::string& patch_id) const {
    for (const auto& e : entries)
        if (e.meta.patch_id() == patch_id) return &e;
    return nullptr;
}

void write_manifest(const DatasetManifest& manifest) {
    fs::create_directories(manifest.root);
    std::vector<ManifestEntry> sorted = manifest.entries;
    std::stable_sort(sorted.begin(), sorted.end(), entry_less);

    CsvRow header = kHeader;
    if (manifest.has_degradation_column) header.emplace_back("degradation_case");
    CsvWriter out(manifest.root / kManifestFile, header);
    for (const auto& e : sorted) {
        CsvRow row = {e.patch_path,   e.meta.source_image_id, std::to_string(e.meta.cell_index),
                      e.meta.well,    e.meta.compound,        e.meta.concentration,
                      e.meta.mechanism, to_string(e.split)};
        if (manifest.has_degradation_column) row.push_back(e.degradation_case);
        out.row(row);
    }
    out.close();
}

DatasetManifest read_manifest(const fs::path& path, bool verify_files) {
    const fs::path file = fs::is_directory(path) ? path / kManifestFile : path;
    const auto rows = read_csv(file);
    if (rows.empty()) throw DataError("empty manifest: " + file.string());
    const CsvRow& header = rows.front();
    if (header.size() < kHeader.size() || !std::equal(kHeader.begin(), kHeader.end(), header.begin()))
        throw DataError("unexpected manifest header in " + file.string());

    DatasetManifest m;
    m.root = file.parent_path();
    m.has_degradation_column = header.size() > kHeader.size() && header[kHeader.size()] == "degradation_case";

    std::set<std::string> ids;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const CsvRow& row = rows[i];
        if (row.size() != header.size())
            throw DataError(file.string() + ": row " + std::to_string(i) + " has wrong field count");
        ManifestEntry e;
        e.patch_path = row[0];
        e.meta.source_image_id = row[1];
        try {
            e.meta.cell_index = std::stoi(row[2]);
        } catch (const std::exception&) {
            throw DataError(file.string() + ": bad cell_index '" + row[2] + "'");
        }
        e.meta.well = row[3];
        e.meta.compound = row[4];
        e.meta.concentration = row[5];
        e.meta.mechanism = row[6];
        e.split = parse_split_tag(row[7]);
        if (m.has_degradation_column) e.degradation_case = row[8];
        if (e.meta.source_image_id.empty()) throw DataError(file.string() + ": empty source_image_id");
        if (!ids.insert(e.meta.patch_id()).second)
            throw DataError(file.string() + ": duplicate patch " + e.meta.patch_id());
        m.entries.push_back(std::move(e));
    }

    if (verify_files) {
        for (const auto& e : m.entries) {
            for (const auto& f : {m.nucleus_file(e), m.tubule_file(e)}) {
                if (!fs::exists(f)) throw DataError("missing patch file " + f.string());
                const auto [h, w] = png_dimensions(f);
                if (h != w) throw DataError("non-square patch " + f.string());
                if (m.patch_size == 0) m.patch_size = h;
                if (h != m.patch_size) throw DataError("inconsistent patch size at " + f.string());
            }
        }
    }
    return m;
}

ImagePatch load_patch(const DatasetManifest& manifest, const ManifestEntry& entry) {
    ImagePatch p;
    p.nucleus = read_patch_png(manifest.nucleus_file(entry));
    p.tubule = read_patch_png(manifest.tubule_file(entry));
    p.meta = entry.meta;
    validate_patch(p);
    return p;
}

std::vector<ImagePatch> load_patches(const DatasetManifest& manifest) {
    std::vector<ImagePatch> out(manifest.entries.size());
    std::vector<std::string> errors(out.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < out.size(); ++i) {
        try {
            out[i] = load_patch(manifest, manifest.entries[i]);
        } catch (const std::exception& ex) {
            errors[i] = ex.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw DataError(e);
    return out;
}

std::string save_patch(const fs::path& root, const ImagePatch& patch) {
    validate_patch(patch);
    const std::string stem = "patches/" + patch.meta.patch_id();
    fs::create_directories(root / "patches");
    write_patch_png(root / (stem + "_nucleus.png"), patch.nucleus);
    write_patch_png(root / (stem + "_tubule.png"), patch.tubule);
    return stem;
}

}  // namespace hcs
