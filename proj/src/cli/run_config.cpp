#include "run_config.hpp"

#include <cmath>
#include <set>

namespace hcs::cli {
namespace {

const std::set<std::string> kSplits{"all", "train", "val", "test"};

void check_split(const ConfigReader& r, const std::string& key, const std::string& value) {
    if (!kSplits.contains(value)) r.fail(key, "expected one of all, train, val, test");
}

void check_ratios(const ConfigReader& r, const std::string& key, const std::vector<double>& v) {
    if (v.size() != 3) r.fail(key, "expected three ratios (train, val, test)");
    double sum = 0.0;
    for (double x : v) {
        if (x < 0.0) r.fail(key, "ratios must be >= 0");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) r.fail(key, "ratios must sum to 1");
}

FixturesSection parse_fixtures(ConfigReader r) {
    FixturesSection s;
    r.get("patches", s.patches);
    r.get("id_prefix", s.id_prefix);
    r.get("split", s.split);
    r.get("raw_images", s.raw_images);
    r.get("raw_side", s.raw_side);
    r.get("cells_per_image", s.cells_per_image);
    ConfigReader style = r.child("style");
    style.get("size", s.style.size);
    style.get("min_filaments", s.style.min_filaments);
    style.get("max_filaments", s.style.max_filaments);
    style.get("filament_scale", s.style.filament_scale);
    style.get("nucleus_radius_lo", s.style.nucleus_radius_lo);
    style.get("nucleus_radius_hi", s.style.nucleus_radius_hi);
    style.finish();
    if (const Json* t = r.raw("treatments")) {
        if (!t->is_array()) r.fail("treatments", "expected an array of objects");
        for (std::size_t i = 0; i < t->size(); ++i) {
            ConfigReader item((*t)[i], r.field("treatments") + "[" + std::to_string(i) + "]");
            FixtureOptions::Treatment tr;
            item.get("compound", tr.compound);
            item.get("concentration", tr.concentration);
            item.get("mechanism", tr.mechanism);
            item.get("filament_scale", tr.filament_scale);
            item.finish();
            if (tr.filament_scale < 0.0) item.fail("filament_scale", "must be >= 0");
            s.treatments.push_back(std::move(tr));
        }
    }
    r.finish();
    require_positive(r, "patches", s.patches);
    check_ratios(r, "split", s.split);
    require_non_negative(r, "raw_images", s.raw_images);
    require_positive(r, "cells_per_image", s.cells_per_image);
    if (s.style.size < 16) style.fail("size", "must be >= 16");
    if (s.style.min_filaments < 0 || s.style.max_filaments < s.style.min_filaments)
        style.fail("max_filaments", "need 0 <= min_filaments <= max_filaments");
    if (s.raw_side < s.style.size + 8) r.fail("raw_side", "must exceed the cell size by at least 8");
    return s;
}

IngestSection parse_ingest(ConfigReader r) {
    IngestSection s;
    r.get("input_dir", s.input_dir);
    r.get("nucleus_suffix", s.nucleus_suffix);
    r.get("tubule_suffix", s.tubule_suffix);
    r.get("annotations", s.annotations);
    r.get("patch_size", s.patch_size);
    r.get("min_nucleus_area", s.min_nucleus_area);
    r.get("downsample", s.downsample);
    r.finish();
    require_positive(r, "patch_size", s.patch_size);
    require_non_negative(r, "min_nucleus_area", s.min_nucleus_area);
    require_positive(r, "downsample", s.downsample);
    return s;
}

SplitSection parse_split(ConfigReader r) {
    SplitSection s;
    r.get("input", s.input);
    r.get("ratios", s.ratios);
    r.finish();
    check_ratios(r, "ratios", s.ratios);
    return s;
}

DegradeSection parse_degrade(ConfigReader r) {
    DegradeSection s;
    r.get("input", s.input);
    r.get("cases", s.cases);
    r.get("sigma_fine", s.sigma_fine);
    r.get("sigma_coarse", s.sigma_coarse);
    r.get("noise_scale", s.noise_scale);
    r.get("output_side", s.output_side);
    r.get("split", s.split);
    r.finish();
    static const std::set<std::string> known{"1", "2a", "2b", "2c", "3a", "3b", "3c"};
    if (s.cases.empty()) r.fail("cases", "must name at least one case");
    for (const auto& c : s.cases)
        if (!known.contains(c)) r.fail("cases", "unknown case '" + c + "'");
    require_positive(r, "sigma_fine", s.sigma_fine);
    require_positive(r, "sigma_coarse", s.sigma_coarse);
    require_non_negative(r, "noise_scale", s.noise_scale);
    require_non_negative(r, "output_side", s.output_side);
    check_split(r, "split", s.split);
    return s;
}

TrainSection parse_train(const Json& node, const std::string& path) {
    TrainSection s;
    Json rest = node;
    ConfigReader r(node, path);
    for (const char* key : {"source", "target", "source_split", "target_split", "resume_from"}) rest.erase(key);
    r.get("source", s.source);
    r.get("target", s.target);
    r.get("source_split", s.source_split);
    r.get("target_split", s.target_split);
    r.get("resume_from", s.resume_from);
    if (rest.contains("seed")) r.fail("seed", "training randomness derives from the global seed");
    s.train = neural::train_config_from_json(rest, path);
    check_split(r, "source_split", s.source_split);
    check_split(r, "target_split", s.target_split);
    return s;
}

RestoreSection parse_restore(ConfigReader r) {
    RestoreSection s;
    r.get("input", s.input);
    r.get("method", s.method);
    r.get("checkpoint", s.checkpoint);
    r.get("psf_sigma", s.psf_sigma);
    r.get("rl_iterations", s.rl_iterations);
    r.get("split", s.split);
    r.finish();
    static const std::set<std::string> methods{"cyclegan", "pix2pix", "rl", "identity"};
    if (!methods.contains(s.method)) r.fail("method", "expected one of cyclegan, pix2pix, rl, identity");
    require_positive(r, "psf_sigma", s.psf_sigma);
    require_positive(r, "rl_iterations", s.rl_iterations);
    check_split(r, "split", s.split);
    return s;
}

EvaluateSection parse_evaluate(ConfigReader r) {
    EvaluateSection s;
    r.get("restored", s.restored);
    r.get("ground_truth", s.ground_truth);
    r.get("method", s.method);
    r.get("case", s.case_name);
    r.finish();
    return s;
}

TrackSection parse_track(ConfigReader r) {
    TrackSection s;
    r.get("checkpoints", s.checkpoints);
    r.get("degraded", s.degraded);
    r.get("ground_truth", s.ground_truth);
    r.get("case", s.case_name);
    r.get("split", s.split);
    r.finish();
    check_split(r, "split", s.split);
    return s;
}

SegmentSection parse_segment(ConfigReader r) {
    SegmentSection s;
    r.get("input", s.input);
    r.get("method", s.method);
    r.get("split", s.split);
    r.finish();
    if (s.method != "otsu" && s.method != "sobel") r.fail("method", "expected otsu or sobel");
    check_split(r, "split", s.split);
    return s;
}

QuantifySection parse_quantify(ConfigReader r) {
    QuantifySection s;
    r.get("input", s.input);
    r.get("radius_px", s.radius_px);
    r.get("split", s.split);
    r.finish();
    require_positive(r, "radius_px", s.radius_px);
    check_split(r, "split", s.split);
    return s;
}

DoseSection parse_dose(ConfigReader r) {
    DoseSection s;
    r.get("densities", s.densities);
    r.get("baseline", s.baseline);
    r.get("baseline_compounds", s.baseline_compounds);
    r.get("per_combo_n", s.per_combo_n);
    r.get("baseline_n", s.baseline_n);
    if (const Json* d = r.raw("declared")) {
        if (!d->is_array()) r.fail("declared", "expected an array of [compound, concentration] pairs");
        for (const auto& item : *d) {
            if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_string())
                r.fail("declared", "expected an array of [compound, concentration] string pairs");
            s.declared.emplace_back(item[0].get<std::string>(), item[1].get<std::string>());
        }
    }
    r.finish();
    require_positive(r, "per_combo_n", s.per_combo_n);
    require_positive(r, "baseline_n", s.baseline_n);
    return s;
}

}  // namespace

RunConfig parse_run_config(const Json& doc) {
    ConfigReader r(doc, "");
    RunConfig c;
    r.get("run_id", c.run_id);
    r.get("output_root", c.output_root);
    r.get("seed", c.seed);
    if (c.run_id.empty() || c.run_id.find('/') != std::string::npos || c.run_id == "." || c.run_id == "..")
        r.fail("run_id", "must be a non-empty name without '/'");
    c.fixtures = parse_fixtures(r.child("fixtures"));
    c.ingest = parse_ingest(r.child("ingest"));
    c.split = parse_split(r.child("split"));
    c.degrade = parse_degrade(r.child("degrade"));
    c.cyclegan = parse_train(r.raw("cyclegan") ? *r.raw("cyclegan") : Json::object(), "cyclegan");
    c.pix2pix = parse_train(r.raw("pix2pix") ? *r.raw("pix2pix") : Json::object(), "pix2pix");
    c.restore = parse_restore(r.child("restore"));
    c.evaluate = parse_evaluate(r.child("evaluate"));
    c.track = parse_track(r.child("track"));
    c.segment = parse_segment(r.child("segment"));
    c.quantify = parse_quantify(r.child("quantify"));
    c.dose_response = parse_dose(r.child("dose_response"));
    r.finish();
    return c;
}

void apply_override(Json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(text);
    } catch (const Json::parse_error&) {
        value = text;
    }
    Json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
        if (!node->is_object()) throw ConfigError("override '" + key + "' descends into a non-object");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = Json::object();
        start = dot + 1;
    }
}

}  // namespace hcs::cli
