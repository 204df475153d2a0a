#include "hcs/quantify.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "hcs/csv.hpp"
#include "hcs/errors.hpp"
#include "hcs/kernels.hpp"
#include "hcs/morphology.hpp"
#include "hcs/plot.hpp"
#include "hcs/rng.hpp"

namespace hcs {
namespace fs = std::filesystem;

BinaryMask segment_microtubules(const ImagePatch& enhanced) {
    return threshold_above(enhanced.tubule, otsu_threshold(enhanced.tubule));
}

BinaryMask segment_nucleus(const ImagePatch& patch) {
    return threshold_above(patch.nucleus, otsu_threshold(patch.nucleus));
}

BinaryMask perinuclear_ring(const BinaryMask& nucleus_mask, int radius_px) {
    BinaryMask ring = dilate_euclidean(nucleus_mask, radius_px);
    auto r = ring.bits();
    auto n = nucleus_mask.bits();
    for (std::size_t i = 0; i < r.size(); ++i)
        if (n[i]) r[i] = 0;
    return ring;
}

DensityRecord perinuclear_density(const BinaryMask& tubule_mask, const BinaryMask& nucleus_mask,
                                  int radius_px) {
    if (!tubule_mask.same_shape(nucleus_mask)) throw ShapeError("tubule and nucleus masks differ in shape");
    if (nucleus_mask.count() == 0) throw DegenerateInputError("empty nucleus mask");
    const BinaryMask ring = perinuclear_ring(nucleus_mask, radius_px);
    DensityRecord rec;
    auto r = ring.bits();
    auto t = tubule_mask.bits();
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!r[i]) continue;
        ++rec.ring_px;
        if (t[i]) ++rec.seg_px;
    }
    if (rec.ring_px == 0) throw DegenerateInputError("perinuclear ring is empty");
    rec.density = static_cast<double>(rec.seg_px) / static_cast<double>(rec.ring_px);
    return rec;
}

DensityRecord measure_patch(const ImagePatch& enhanced, int radius_px) {
    ImagePatch p = enhanced;
    if (!p.nucleus.same_shape(p.tubule)) p.nucleus = resize(p.nucleus, p.tubule.height(), p.tubule.width());
    DensityRecord rec = perinuclear_density(segment_microtubules(p), segment_nucleus(p), radius_px);
    rec.patch_id = enhanced.meta.patch_id();
    rec.compound = enhanced.meta.compound;
    rec.concentration = enhanced.meta.concentration;
    rec.mechanism = enhanced.meta.mechanism;
    return rec;
}

void write_density_csv(const fs::path& path, const std::vector<DensityRecord>& records) {
    CsvWriter out(path, {"patch_id", "compound", "concentration", "mechanism", "ring_px", "seg_px", "density"});
    for (const auto& r : records)
        out.row({r.patch_id, r.compound, r.concentration, r.mechanism, std::to_string(r.ring_px),
                 std::to_string(r.seg_px), format_real(r.density)});
    out.close();
}

std::vector<DensityRecord> read_density_csv(const fs::path& path) {
    const auto rows = read_csv(path);
    const CsvRow header = {"patch_id", "compound", "concentration", "mechanism", "ring_px", "seg_px", "density"};
    if (rows.empty() || rows.front() != header) throw DataError("unexpected density csv header in " + path.string());
    std::vector<DensityRecord> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != header.size()) throw DataError("bad density row " + std::to_string(i));
        DensityRecord rec{r[0], r[1], r[2], r[3], 0, 0, 0.0};
        try {
            rec.ring_px = std::stol(r[4]);
            rec.seg_px = std::stol(r[5]);
            rec.density = std::stod(r[6]);
        } catch (const std::exception&) {
            throw DataError("non-numeric density row " + std::to_string(i));
        }
        out.push_back(std::move(rec));
    }
    return out;
}

namespace {

double concentration_value(const std::string& text) {
    try {
        return std::stod(text);
    } catch (const std::exception&) {
        return 0.0;
    }
}

// Mean over a seeded sample without replacement (all items if fewer).
double sampled_mean(std::vector<double> values, std::size_t n, std::uint64_t seed) {
    if (values.size() > n) {
        std::mt19937_64 engine(seed);
        std::shuffle(values.begin(), values.end(), engine);
        values.resize(n);
    }
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

DoseResponse dose_response(const std::vector<DensityRecord>& records,
                           const std::vector<DensityRecord>& baseline_records,
                           const DoseResponseOptions& options) {
    if (options.per_combo_n == 0 || options.baseline_n == 0) throw ParameterError("sample sizes must be >= 1");

    // Records are grouped in patch-id order so the sample does not depend on
    // the order the caller supplies them in.
    std::map<std::pair<std::string, std::string>, std::vector<const DensityRecord*>> groups;
    for (const auto& r : records) groups[{r.compound, r.concentration}].push_back(&r);
    for (const auto& key : options.declared)
        if (!groups.contains(key))
            throw DataError("no records for declared combination " + key.first + " @ " + key.second);

    DoseResponse table;
    for (auto& [key, members] : groups) {
        std::sort(members.begin(), members.end(),
                  [](const DensityRecord* a, const DensityRecord* b) { return a->patch_id < b->patch_id; });
        std::vector<double> values;
        values.reserve(members.size());
        for (const auto* m : members) values.push_back(m->density);
        DoseResponseRow row;
        row.compound = key.first;
        row.concentration = key.second;
        row.mechanism = members.front()->mechanism;
        row.n_available = values.size();
        row.n_used = std::min(values.size(), options.per_combo_n);
        if (values.size() < options.per_combo_n)
            table.warnings.push_back(key.first + " @ " + key.second + ": only " +
                                     std::to_string(values.size()) + " cells available");
        row.mean_density = sampled_mean(values, options.per_combo_n,
                                        derive_seed(options.seed, {"dose", key.first, key.second}));
        table.rows.push_back(std::move(row));
    }
    std::stable_sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
        if (a.compound != b.compound) return a.compound < b.compound;
        return concentration_value(a.concentration) < concentration_value(b.concentration);
    });

    if (!baseline_records.empty()) {
        std::vector<const DensityRecord*> sorted;
        for (const auto& r : baseline_records) sorted.push_back(&r);
        std::sort(sorted.begin(), sorted.end(),
                  [](const DensityRecord* a, const DensityRecord* b) { return a->patch_id < b->patch_id; });
        std::vector<double> values;
        for (const auto* r : sorted) values.push_back(r->density);
        table.baseline_n = std::min(values.size(), options.baseline_n);
        if (values.size() < options.baseline_n)
            table.warnings.push_back("baseline: only " + std::to_string(values.size()) + " cells available");
        table.baseline_mean = sampled_mean(values, options.baseline_n, derive_seed(options.seed, {"baseline"}));
    }
    return table;
}

void write_dose_response_csv(const fs::path& path, const DoseResponse& table) {
    CsvWriter out(path, {"compound", "concentration", "mechanism", "n_available", "n_used", "mean_density"});
    for (const auto& r : table.rows)
        out.row({r.compound, r.concentration, r.mechanism, std::to_string(r.n_available),
                 std::to_string(r.n_used), format_real(r.mean_density)});
    if (table.baseline_n > 0)
        out.row({"untreated", "0", "baseline", std::to_string(table.baseline_n),
                 std::to_string(table.baseline_n), format_real(table.baseline_mean)});
    out.close();
}

std::vector<fs::path> plot_dose_response(const fs::path& out_dir, const DoseResponse& table) {
    std::map<std::string, std::map<std::string, std::vector<const DoseResponseRow*>>> by_mechanism;
    for (const auto& r : table.rows) by_mechanism[r.mechanism][r.compound].push_back(&r);

    std::vector<fs::path> written;
    fs::create_directories(out_dir);
    for (const auto& [mechanism, compounds] : by_mechanism) {
        LinePlot plot;
        plot.title = mechanism.empty() ? "dose response" : mechanism;
        plot.x_label = "concentration";
        plot.y_label = "microtubule density";
        plot.log_x = true;
        double x_lo = 0.0;
        double x_hi = 0.0;
        bool any = false;
        std::size_t color = 0;
        for (const auto& [compound, rows] : compounds) {
            PlotSeries s;
            s.label = compound;
            s.color = palette_color(color++);
            for (const auto* r : rows) {
                const double c = concentration_value(r->concentration);
                if (!(c > 0.0)) continue;
                s.x.push_back(c);
                s.y.push_back(r->mean_density);
                x_lo = any ? std::min(x_lo, c) : c;
                x_hi = any ? std::max(x_hi, c) : c;
                any = true;
            }
            plot.series.push_back(std::move(s));
        }
        if (table.baseline_n > 0 && any) {
            PlotSeries base;
            base.label = "untreated";
            base.color = {0, 0, 0};
            base.dashed = true;
            base.markers = false;
            base.x = {x_lo, x_hi};
            base.y = {table.baseline_mean, table.baseline_mean};
            plot.series.push_back(std::move(base));
        }
        std::string stem = mechanism.empty() ? "unlabelled" : mechanism;
        std::replace_if(stem.begin(), stem.end(), [](char c) { return !std::isalnum(static_cast<unsigned char>(c)); }, '_');
        const fs::path file = out_dir / ("dose_response_" + stem + ".png");
        write_line_plot(file, plot);
        written.push_back(file);
    }
    return written;
}

}  // namespace hcs
