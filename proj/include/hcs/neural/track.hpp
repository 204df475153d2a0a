#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hcs/evaluate.hpp"
#include "hcs/neural/trainer.hpp"

namespace hcs::neural {

struct TrackRow {
    int epoch = 0;
    MetricReport report;
};

/// Enhances `degraded` with every checkpoint of the series and scores the
/// result against `ground_truth` (paired by patch id).
std::vector<TrackRow> track_training(const CheckpointSeries& series, const std::vector<ImagePatch>& degraded,
                                     const std::vector<ImagePatch>& ground_truth, const std::string& case_name);

/// epoch,ssim_mean,ssim_std,msssim_mean,msssim_std,auc_mean,auc_std,n
void write_track_csv(const std::filesystem::path& path, const std::vector<TrackRow>& rows);

/// One PNG per metric (`<prefix>_<metric>.png`) with the epoch on the x axis.
std::vector<std::filesystem::path> plot_track(const std::filesystem::path& out_dir, const std::string& prefix,
                                              const std::vector<TrackRow>& rows);

}  // namespace hcs::neural
