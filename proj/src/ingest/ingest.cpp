#include "hcs/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "hcs/csv.hpp"
#include "hcs/errors.hpp"
#include "hcs/kernels.hpp"
#include "hcs/morphology.hpp"
#include "hcs/png_io.hpp"

namespace hcs {
namespace fs = std::filesystem;

std::vector<ImagePatch> extract_patches(const Image2D& nucleus_img, const Image2D& tubule_img,
                                        const ExtractOptions& options,
                                        const PatchMeta& image_meta) {
    if (!nucleus_img.same_shape(tubule_img)) throw ShapeError("nucleus/tubule channel shape mismatch");
    if (options.patch_size < 16) throw ParameterError("patch size must be >= 16");

    std::vector<ImagePatch> patches;
    double threshold = 0.0;
    try {
        threshold = otsu_threshold(nucleus_img);
    } catch (const DegenerateInputError&) {
        return patches;
    }
    const auto components = connected_components(threshold_above(nucleus_img, threshold));

    const int half = options.patch_size / 2;
    int cell_index = 0;
    for (const auto& comp : components) {
        if (comp.area < options.min_nucleus_area) continue;
        const int cy = static_cast<int>(std::floor(comp.centroid_row + 0.5));
        const int cx = static_cast<int>(std::floor(comp.centroid_col + 0.5));
        const int r0 = cy - half;
        const int c0 = cx - half;
        if (r0 < 0 || c0 < 0 || r0 + options.patch_size > nucleus_img.height() ||
            c0 + options.patch_size > nucleus_img.width())
            continue;
        ImagePatch p;
        p.nucleus = nucleus_img.crop(r0, c0, options.patch_size, options.patch_size);
        p.tubule = tubule_img.crop(r0, c0, options.patch_size, options.patch_size);
        p.meta = image_meta;
        p.meta.cell_index = cell_index++;
        patches.push_back(std::move(p));
    }
    return patches;
}

DatasetSplit split_dataset(const std::vector<std::string>& raw_image_ids,
                           const std::array<double, 3>& ratios, std::uint64_t seed) {
    for (double r : ratios)
        if (r < 0.0) throw ParameterError("split ratios must be non-negative");
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9)
        throw ParameterError("split ratios must sum to 1");

    std::vector<std::string> ids = raw_image_ids;
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw DataError("duplicate raw image ids");

    // Sorting first makes the partition independent of input order.
    std::mt19937_64 engine(seed);
    std::shuffle(ids.begin(), ids.end(), engine);

    const auto n = static_cast<double>(ids.size());
    const auto n_train = static_cast<std::size_t>(std::llround(ratios[0] * n));
    const auto n_val = std::min(ids.size() - n_train, static_cast<std::size_t>(std::llround(ratios[1] * n)));

    DatasetSplit split;
    split.train.assign(ids.begin(), ids.begin() + n_train);
    split.val.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
    split.test.assign(ids.begin() + n_train + n_val, ids.end());
    return split;
}

void apply_split(DatasetManifest& manifest, const DatasetSplit& split) {
    const std::set<std::string> train(split.train.begin(), split.train.end());
    const std::set<std::string> val(split.val.begin(), split.val.end());
    const std::set<std::string> test(split.test.begin(), split.test.end());
    for (auto& e : manifest.entries) {
        const auto& id = e.meta.source_image_id;
        if (train.contains(id)) e.split = SplitTag::Train;
        else if (val.contains(id)) e.split = SplitTag::Val;
        else if (test.contains(id)) e.split = SplitTag::Test;
        else throw DataError("source image " + id + " is not covered by the split");
    }
}

namespace {

double mean_nucleus_area(const std::vector<ImagePatch>& patches) {
    double total = 0.0;
    long used = 0;
    for (const auto& p : patches) {
        double thr = 0.0;
        try {
            thr = otsu_threshold(p.nucleus);
        } catch (const DegenerateInputError&) {
            continue;
        }
        const auto area = threshold_above(p.nucleus, thr).count();
        if (area == 0) continue;
        total += static_cast<double>(area);
        ++used;
    }
    if (used == 0) throw DegenerateInputError("no patch with a segmentable nucleus");
    return total / static_cast<double>(used);
}

}  // namespace

double compute_magnification(const std::vector<ImagePatch>& nucleus_patches_a,
                             const std::vector<ImagePatch>& nucleus_patches_b) {
    if (nucleus_patches_a.empty() || nucleus_patches_b.empty())
        throw ParameterError("magnification needs patches from both domains");
    return std::sqrt(mean_nucleus_area(nucleus_patches_a) / mean_nucleus_area(nucleus_patches_b));
}

int matched_patch_side(int base_side, double magnification) {
    if (!(magnification > 0.0)) throw ParameterError("magnification must be > 0");
    return static_cast<int>(std::floor(base_side / magnification));
}

std::map<std::string, PatchMeta> read_annotations(const fs::path& csv) {
    const auto rows = read_csv(csv);
    if (rows.empty()) throw DataError("empty annotation file " + csv.string());
    const CsvRow expected = {"image_id", "well", "compound", "concentration", "mechanism"};
    if (rows.front() != expected)
        throw DataError("annotation header must be image_id,well,compound,concentration,mechanism");
    std::map<std::string, PatchMeta> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != expected.size()) throw DataError("bad annotation row " + std::to_string(i));
        out[r[0]] = PatchMeta{r[0], 0, r[1], r[2], r[3], r[4]};
    }
    return out;
}

DatasetManifest ingest_directory(const fs::path& input_dir, const fs::path& out_dir,
                                 const IngestOptions& options) {
    if (!fs::is_directory(input_dir)) throw DataError("input directory not found: " + input_dir.string());
    if (options.downsample < 1) throw ParameterError("downsample factor must be >= 1");

    std::vector<std::string> stems;
    for (const auto& item : fs::directory_iterator(input_dir)) {
        const std::string name = item.path().filename().string();
        if (name.size() > options.nucleus_suffix.size() &&
            name.ends_with(options.nucleus_suffix)) {
            const std::string stem = name.substr(0, name.size() - options.nucleus_suffix.size());
            if (fs::exists(input_dir / (stem + options.tubule_suffix))) stems.push_back(stem);
        }
    }
    std::sort(stems.begin(), stems.end());

    std::vector<std::vector<ImagePatch>> per_image(stems.size());
    std::vector<std::string> errors(stems.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < stems.size(); ++i) {
        try {
            Image2D nuc = read_png_gray(input_dir / (stems[i] + options.nucleus_suffix));
            Image2D tub = read_png_gray(input_dir / (stems[i] + options.tubule_suffix));
            if (options.downsample > 1) {
                nuc = resize(nuc, nuc.height() / options.downsample, nuc.width() / options.downsample);
                tub = resize(tub, tub.height() / options.downsample, tub.width() / options.downsample);
            }
            PatchMeta meta;
            if (auto it = options.annotations.find(stems[i]); it != options.annotations.end())
                meta = it->second;
            meta.source_image_id = stems[i];
            per_image[i] = extract_patches(nuc, tub, options.extract, meta);
        } catch (const std::exception& ex) {
            errors[i] = stems[i] + ": " + ex.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw DataError(e);

    // Single-writer merge in sorted image-id order.
    DatasetManifest manifest;
    manifest.root = out_dir;
    manifest.patch_size = options.extract.patch_size;
    fs::create_directories(out_dir);
    for (const auto& patches : per_image) {
        for (const auto& p : patches) {
            ManifestEntry e;
            e.patch_path = save_patch(out_dir, p);
            e.meta = p.meta;
            manifest.entries.push_back(std::move(e));
        }
    }
    write_manifest(manifest);
    return manifest;
}

}  // namespace hcs
