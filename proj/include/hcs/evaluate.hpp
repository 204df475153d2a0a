#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hcs/manifest.hpp"
#include "hcs/patch.hpp"

namespace hcs {

struct PatchScores {
    std::string patch_id;
    double ssim = 0.0;
    double msssim = 0.0;
    double auc = 0.0;
};

/// Aggregated reconstruction quality; means and stds are x100, stds use the
/// population form (divide by n) across patches.
struct MetricReport {
    std::string method;
    std::string case_name;
    double ssim_mean = 0.0;
    double ssim_std = 0.0;
    double msssim_mean = 0.0;
    double msssim_std = 0.0;
    double auc_mean = 0.0;
    double auc_std = 0.0;
    int n_patches = 0;
    std::vector<PatchScores> per_patch;  // sorted by patch id
};

inline constexpr int kEvaluationSide = 128;
inline constexpr int kMsssimScales = 4;

/// Tubule-channel metrics of one restored patch against its ground truth.
/// The restored image is resized to the ground-truth grid when they differ.
PatchScores score_patch(const ImagePatch& restored, const ImagePatch& ground_truth);

/// Every restored patch must have a ground-truth patch with the same id
/// (DataError otherwise); ground-truth patches without a restored
/// counterpart are ignored. The result does not depend on input order.
MetricReport evaluate_testset(const std::vector<ImagePatch>& restored, const std::vector<ImagePatch>& ground_truth,
                              const std::string& method = "", const std::string& case_name = "");
MetricReport evaluate_testset(const DatasetManifest& restored, const DatasetManifest& ground_truth,
                              const std::string& method = "", const std::string& case_name = "");

/// Mean/std (x100) over per-patch scores.
MetricReport aggregate(std::vector<PatchScores> scores, const std::string& method, const std::string& case_name);

/// Long format: method,case,metric,mean,std,n with one row per metric and report.
void write_metric_report(const std::filesystem::path& path, const std::vector<MetricReport>& reports);
/// patch_id,ssim,msssim,auc (raw, not x100).
void write_patch_scores(const std::filesystem::path& path, const MetricReport& report);

}  // namespace hcs
