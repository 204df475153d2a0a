#include <algorithm>
#include <cstdio>
#include <set>

#include "context.hpp"
#include "hcs/csv.hpp"
#include "hcs/degrade.hpp"
#include "hcs/errors.hpp"
#include "hcs/evaluate.hpp"
#include "hcs/ingest.hpp"
#include "hcs/kernels.hpp"
#include "hcs/log.hpp"
#include "hcs/neural/enhance.hpp"
#include "hcs/neural/track.hpp"
#include "hcs/neural/trainer.hpp"
#include "hcs/parallel.hpp"
#include "hcs/png_io.hpp"
#include "hcs/quantify.hpp"
#include "hcs/restore.hpp"
#include "hcs/synth.hpp"

namespace hcs::cli {
namespace {

std::array<double, 3> ratios3(const std::vector<double>& v) { return {v.at(0), v.at(1), v.at(2)}; }

std::vector<std::string> source_ids(const DatasetManifest& m) {
    std::set<std::string> ids;
    for (const auto& e : m.entries) ids.insert(e.meta.source_image_id);
    return {ids.begin(), ids.end()};
}

// Saves `patches` as a new dataset, carrying split and case tags over from
// the entries they were made from.
DatasetManifest write_dataset(const fs::path& root, const std::vector<ImagePatch>& patches,
                              const DatasetManifest& source) {
    DatasetManifest out;
    out.root = root;
    out.has_degradation_column = source.has_degradation_column;
    for (std::size_t i = 0; i < patches.size(); ++i) {
        ManifestEntry e = source.entries.at(i);
        e.patch_path = save_patch(root, patches[i]);
        e.meta = patches[i].meta;
        out.entries.push_back(std::move(e));
        out.patch_size = patches[i].size_px();
    }
    write_manifest(out);
    return out;
}

std::string common_case(const DatasetManifest& m) {
    std::set<std::string> cases;
    for (const auto& e : m.entries) cases.insert(e.degradation_case);
    return cases.size() == 1 ? *cases.begin() : std::string();
}

fs::path latest_checkpoint(const fs::path& p) {
    if (fs::is_regular_file(p)) return p;
    const auto series = neural::scan_checkpoints(p);
    if (series.checkpoints.empty()) throw DataError("no checkpoints under " + p.string());
    return series.checkpoints.back().path;
}

}  // namespace

void cmd_synth_fixtures(RunContext& ctx) {
    const auto& f = ctx.config.fixtures;
    FixtureOptions opt;
    opt.patches = f.patches;
    opt.seed = ctx.seed_for("fixtures");
    opt.style = f.style;
    opt.id_prefix = f.id_prefix;
    opt.treatments = f.treatments;
    DatasetManifest m = write_fixture_dataset(ctx.out_dir, opt);
    apply_split(m, split_dataset(source_ids(m), ratios3(f.split), ctx.seed_for("split")));
    write_manifest(m);

    if (f.raw_images > 0) {
        const fs::path raw = ctx.out_dir / "raw";
        fs::create_directories(raw);
        CsvWriter ann(raw / "annotations.csv", {"image_id", "well", "compound", "concentration", "mechanism"});
        for (int i = 0; i < f.raw_images; ++i) {
            char id[32];
            std::snprintf(id, sizeof id, "field%03d", i);
            CellStyle style = f.style;
            FixtureOptions::Treatment t;
            if (!f.treatments.empty()) {
                t = f.treatments[static_cast<std::size_t>(i) % f.treatments.size()];
                style.filament_scale *= t.filament_scale;
            }
            const auto field = synth_field(derive_seed(ctx.config.seed, {"raw-field", id}), f.raw_side, f.raw_side,
                                           f.cells_per_image, style);
            write_png_gray8(raw / (std::string(id) + "_nucleus.png"), field.nucleus);
            write_png_gray8(raw / (std::string(id) + "_tubule.png"), field.tubule);
            char well[16];
            std::snprintf(well, sizeof well, "W%02d", i);
            ann.row({id, well, t.compound, t.concentration, t.mechanism});
        }
        ann.close();
    }
    log::info("wrote " + std::to_string(m.entries.size()) + " fixture patches");
}

void cmd_extract_patches(RunContext& ctx) {
    const auto& s = ctx.config.ingest;
    IngestOptions opt;
    opt.nucleus_suffix = s.nucleus_suffix;
    opt.tubule_suffix = s.tubule_suffix;
    opt.extract.patch_size = s.patch_size;
    opt.extract.min_nucleus_area = s.min_nucleus_area;
    opt.downsample = s.downsample;
    if (!s.annotations.empty()) {
        const fs::path ann = ctx.resolve(s.annotations, "ingest.annotations");
        opt.annotations = read_annotations(ann);
        ctx.inputs.push_back(ann);
    }
    const fs::path input = ctx.resolve(s.input_dir, "ingest.input_dir");
    if (!fs::is_directory(input)) throw DataError("input directory " + input.string() + " does not exist");
    ctx.inputs.push_back(input);
    const auto m = ingest_directory(input, ctx.out_dir, opt);
    log::info("extracted " + std::to_string(m.entries.size()) + " patches");
}

void cmd_split(RunContext& ctx) {
    const auto& s = ctx.config.split;
    const DatasetManifest in = ctx.open_manifest(s.input, "split.input");
    std::vector<ImagePatch> patches = load_patches(in);
    DatasetManifest out = write_dataset(ctx.out_dir, patches, in);
    const auto split = split_dataset(source_ids(in), ratios3(s.ratios), ctx.seed_for("split"));
    apply_split(out, split);
    write_manifest(out);
    log::info("split " + std::to_string(source_ids(in).size()) + " source images: " +
              std::to_string(split.train.size()) + " train, " + std::to_string(split.val.size()) + " val, " +
              std::to_string(split.test.size()) + " test");
}

void cmd_simulate(RunContext& ctx) {
    const auto& s = ctx.config.degrade;
    const DatasetManifest in = select_split(ctx.open_manifest(s.input, "degrade.input"), s.split);
    std::vector<DegradationSpec> specs;
    for (auto spec : standard_suite()) {
        if (std::find(s.cases.begin(), s.cases.end(), spec.name) == s.cases.end()) continue;
        spec.sigma_fine = s.sigma_fine;
        spec.sigma_coarse = s.sigma_coarse;
        spec.noise_scale = s.noise_scale;
        spec.output_side = s.output_side;
        validate(spec);
        specs.push_back(spec);
    }
    const auto suite = build_simulation_suite(in, specs, ctx.seed_for("degrade"), ctx.out_dir);
    for (const auto& m : suite)
        log::info("case " + m.entries.front().degradation_case + ": " + std::to_string(m.entries.size()) + " patches");
}

namespace {

void run_training(RunContext& ctx, const TrainSection& s, const char* section, bool paired) {
    const std::string sec(section);
    const DatasetManifest source = select_split(ctx.open_manifest(s.source, sec + ".source"), s.source_split);
    const DatasetManifest target = select_split(ctx.open_manifest(s.target, sec + ".target"), s.target_split);
    neural::TrainConfig cfg = s.train;
    cfg.seed = ctx.seed_for("train");
    neural::TrainRunOptions opt;
    opt.out_dir = ctx.out_dir;
    if (!s.resume_from.empty()) {
        opt.resume_from = latest_checkpoint(ctx.resolve(s.resume_from, sec + ".resume_from"));
        ctx.inputs.push_back(*opt.resume_from);
    }
    const auto series = paired ? neural::train_pix2pix(source, target, cfg, opt)
                               : neural::train_cyclegan(source, target, cfg, opt);
    log::info("wrote " + std::to_string(series.checkpoints.size()) + " checkpoints");
}

}  // namespace

void cmd_train_cyclegan(RunContext& ctx) { run_training(ctx, ctx.config.cyclegan, "cyclegan", false); }

void cmd_train_pix2pix(RunContext& ctx) { run_training(ctx, ctx.config.pix2pix, "pix2pix", true); }

void cmd_restore(RunContext& ctx) {
    const auto& s = ctx.config.restore;
    const DatasetManifest in = select_split(ctx.open_manifest(s.input, "restore.input"), s.split);
    std::vector<ImagePatch> patches = load_patches(in);
    if (s.method == "cyclegan" || s.method == "pix2pix") {
        const fs::path ckpt = latest_checkpoint(ctx.resolve(s.checkpoint, "restore.checkpoint"));
        ctx.inputs.push_back(ckpt);
        const auto header = neural::read_checkpoint_header(ckpt);
        const auto expected = s.method == "cyclegan" ? neural::ModelKind::CycleGan : neural::ModelKind::Pix2Pix;
        if (header.kind != expected)
            throw ConfigError("restore.checkpoint: " + ckpt.string() + " holds a " + neural::to_string(header.kind) +
                              " model, not " + s.method);
        patches = neural::Enhancer::from_checkpoint(ckpt).enhance(patches);
    } else if (s.method == "rl") {
        parallel_for(patches.size(), [&](std::size_t i) {
            auto& p = patches[i];
            p.tubule = to_uint8(richardson_lucy(p.tubule, s.psf_sigma, s.rl_iterations));
        });
    }
    write_dataset(ctx.out_dir, patches, in);
    log::info("restored " + std::to_string(patches.size()) + " patches with " + s.method);
}

void cmd_evaluate(RunContext& ctx) {
    const auto& s = ctx.config.evaluate;
    const DatasetManifest restored = ctx.open_manifest(s.restored, "evaluate.restored");
    const DatasetManifest truth = ctx.open_manifest(s.ground_truth, "evaluate.ground_truth");
    const std::string method = s.method.empty() ? restored.root.filename().string() : s.method;
    const std::string case_name = s.case_name.empty() ? common_case(restored) : s.case_name;
    const MetricReport report = evaluate_testset(restored, truth, method, case_name);
    write_metric_report(ctx.out_dir / "metrics.csv", {report});
    write_patch_scores(ctx.out_dir / "patch_scores.csv", report);
    log::info(method + " case " + case_name + ": SSIM " + format_real(report.ssim_mean) + ", MS-SSIM " +
              format_real(report.msssim_mean) + ", AUC " + format_real(report.auc_mean) + " over " +
              std::to_string(report.n_patches) + " patches");
}

void cmd_track(RunContext& ctx) {
    const auto& s = ctx.config.track;
    const fs::path dir = ctx.resolve(s.checkpoints, "track.checkpoints");
    const auto series = neural::scan_checkpoints(dir);
    if (series.checkpoints.empty()) throw DataError("no checkpoints under " + dir.string());
    ctx.inputs.push_back(series.dir);
    const DatasetManifest degraded = select_split(ctx.open_manifest(s.degraded, "track.degraded"), s.split);
    const DatasetManifest truth = ctx.open_manifest(s.ground_truth, "track.ground_truth");
    const std::string case_name = s.case_name.empty() ? common_case(degraded) : s.case_name;
    const auto rows = neural::track_training(series, load_patches(degraded), load_patches(truth), case_name);
    neural::write_track_csv(ctx.out_dir / "track.csv", rows);
    neural::plot_track(ctx.out_dir, "track", rows);
}

void cmd_segment(RunContext& ctx) {
    const auto& s = ctx.config.segment;
    const DatasetManifest in = select_split(ctx.open_manifest(s.input, "segment.input"), s.split);
    const auto patches = load_patches(in);
    std::vector<BinaryMask> masks(patches.size());
    parallel_for(patches.size(), [&](std::size_t i) {
        masks[i] = s.method == "otsu" ? segment_microtubules(patches[i]) : sobel_otsu_segment(patches[i].tubule);
    });
    fs::create_directories(ctx.out_dir / "masks");
    CsvWriter csv(ctx.out_dir / "segmentation.csv", {"patch_id", "seg_px", "total_px", "fraction"});
    for (std::size_t i = 0; i < patches.size(); ++i) {
        const auto& m = masks[i];
        Image2D img(m.height(), m.width());
        for (int r = 0; r < m.height(); ++r)
            for (int c = 0; c < m.width(); ++c) img(r, c) = m(r, c) ? 255.0 : 0.0;
        const std::string id = patches[i].meta.patch_id();
        write_png_gray8(ctx.out_dir / "masks" / (id + "_mask.png"), img);
        const double count = static_cast<double>(m.count());
        csv.row({id, std::to_string(m.count()), std::to_string(m.size()), format_real(count / double(m.size()))});
    }
    csv.close();
}

void cmd_quantify(RunContext& ctx) {
    const auto& s = ctx.config.quantify;
    const DatasetManifest in = select_split(ctx.open_manifest(s.input, "quantify.input"), s.split);
    const auto patches = load_patches(in);
    std::vector<std::optional<DensityRecord>> measured(patches.size());
    std::vector<std::string> errors(patches.size());
    parallel_for(patches.size(), [&](std::size_t k) {
        try {
            measured[k] = measure_patch(patches[k], s.radius_px);
        } catch (const DegenerateInputError& e) {
            errors[k] = e.what();
        }
    });
    std::vector<DensityRecord> records;
    for (std::size_t k = 0; k < patches.size(); ++k) {
        if (measured[k])
            records.push_back(*measured[k]);
        else
            log::warn("skipping " + patches[k].meta.patch_id() + ": " + errors[k]);
    }
    if (records.empty()) throw DataError("no patch could be measured");
    write_density_csv(ctx.out_dir / "densities.csv", records);
    log::info("measured " + std::to_string(records.size()) + " of " + std::to_string(patches.size()) + " patches");
}

void cmd_dose_response(RunContext& ctx) {
    const auto& s = ctx.config.dose_response;
    const fs::path path = ctx.resolve(s.densities, "dose_response.densities");
    ctx.inputs.push_back(path);
    std::vector<DensityRecord> treated;
    std::vector<DensityRecord> baseline;
    const std::set<std::string> baseline_names(s.baseline_compounds.begin(), s.baseline_compounds.end());
    for (auto& r : read_density_csv(path)) {
        if (s.baseline.empty() && baseline_names.contains(r.compound))
            baseline.push_back(std::move(r));
        else
            treated.push_back(std::move(r));
    }
    if (!s.baseline.empty()) {
        const fs::path b = ctx.resolve(s.baseline, "dose_response.baseline");
        ctx.inputs.push_back(b);
        baseline = read_density_csv(b);
    }
    DoseResponseOptions opt;
    opt.per_combo_n = static_cast<std::size_t>(s.per_combo_n);
    opt.baseline_n = static_cast<std::size_t>(s.baseline_n);
    opt.seed = ctx.seed_for("quantify");
    opt.declared = s.declared;
    const DoseResponse table = dose_response(treated, baseline, opt);
    for (const auto& w : table.warnings) log::warn(w);
    write_dose_response_csv(ctx.out_dir / "dose_response.csv", table);
    plot_dose_response(ctx.out_dir, table);
}

}  // namespace hcs::cli
