#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hcs/config_reader.hpp"
#include "hcs/neural/train_config.hpp"
#include "hcs/synth.hpp"

namespace hcs::cli {

struct FixturesSection {
    int patches = 64;
    std::string id_prefix = "hpa";
    CellStyle style;
    std::vector<double> split{0.8, 0.1, 0.1};
    std::vector<FixtureOptions::Treatment> treatments;
    int raw_images = 0;  // multi-cell fields for extract-patches
    int raw_side = 512;
    int cells_per_image = 4;
};

struct IngestSection {
    std::string input_dir;
    std::string nucleus_suffix = "_nucleus.png";
    std::string tubule_suffix = "_tubule.png";
    std::string annotations;
    int patch_size = 128;
    int min_nucleus_area = 50;
    int downsample = 1;
};

struct SplitSection {
    std::string input;
    std::vector<double> ratios{0.8, 0.1, 0.1};
};

struct DegradeSection {
    std::string input;
    std::vector<std::string> cases{"1", "2a", "2b", "2c", "3a", "3b", "3c"};
    double sigma_fine = 1.0;
    double sigma_coarse = 5.0;
    double noise_scale = 3.0;
    int output_side = 84;
    std::string split = "all";
};

struct TrainSection {
    std::string source;
    std::string target;
    std::string source_split = "train";
    std::string target_split = "train";
    std::string resume_from;
    neural::TrainConfig train;
};

struct RestoreSection {
    std::string input;
    std::string method = "cyclegan";  // cyclegan | pix2pix | rl | identity
    std::string checkpoint;
    double psf_sigma = 1.0;
    int rl_iterations = 30;
    std::string split = "test";
};

struct EvaluateSection {
    std::string restored;
    std::string ground_truth;
    std::string method;
    std::string case_name;
};

struct TrackSection {
    std::string checkpoints;
    std::string degraded;
    std::string ground_truth;
    std::string case_name;
    std::string split = "val";
};

struct SegmentSection {
    std::string input;
    std::string method = "otsu";  // otsu | sobel
    std::string split = "all";
};

struct QuantifySection {
    std::string input;
    int radius_px = 8;
    std::string split = "all";
};

struct DoseSection {
    std::string densities;
    std::string baseline;
    std::vector<std::string> baseline_compounds{"untreated", "DMSO"};
    int per_combo_n = 200;
    int baseline_n = 1000;
    std::vector<std::pair<std::string, std::string>> declared;
};

struct RunConfig {
    std::string run_id = "run";
    std::string output_root = "runs";
    std::uint64_t seed = 0;
    FixturesSection fixtures;
    IngestSection ingest;
    SplitSection split;
    DegradeSection degrade;
    TrainSection cyclegan;
    TrainSection pix2pix;
    RestoreSection restore;
    EvaluateSection evaluate;
    TrackSection track;
    SegmentSection segment;
    QuantifySection quantify;
    DoseSection dose_response;
};

/// Validates the whole document; unknown fields anywhere are errors.
RunConfig parse_run_config(const Json& doc);

/// Applies "a.b.c=value" overrides; value is parsed as JSON, falling back to a
/// plain string.
void apply_override(Json& doc, const std::string& assignment);

}  // namespace hcs::cli
