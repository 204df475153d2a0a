#include "hcs/neural/track.hpp"

#include "hcs/csv.hpp"
#include "hcs/errors.hpp"
#include "hcs/neural/enhance.hpp"
#include "hcs/plot.hpp"

namespace hcs::neural {
namespace fs = std::filesystem;

std::vector<TrackRow> track_training(const CheckpointSeries& series, const std::vector<ImagePatch>& degraded,
                                     const std::vector<ImagePatch>& ground_truth, const std::string& case_name) {
    if (series.checkpoints.empty()) throw DataError("no checkpoints to track");
    std::vector<TrackRow> rows;
    for (const auto& ckpt : series.checkpoints) {
        const Enhancer enhancer = Enhancer::from_checkpoint(ckpt.path);
        const auto restored = enhancer.enhance(degraded);
        rows.push_back({ckpt.epoch, evaluate_testset(restored, ground_truth, "epoch_" + std::to_string(ckpt.epoch),
                                                     case_name)});
    }
    return rows;
}

void write_track_csv(const fs::path& path, const std::vector<TrackRow>& rows) {
    CsvWriter out(path, {"epoch", "ssim_mean", "ssim_std", "msssim_mean", "msssim_std", "auc_mean", "auc_std", "n"});
    for (const auto& row : rows) {
        const auto& r = row.report;
        out.row({std::to_string(row.epoch), format_real(r.ssim_mean), format_real(r.ssim_std),
                 format_real(r.msssim_mean), format_real(r.msssim_std), format_real(r.auc_mean),
                 format_real(r.auc_std), std::to_string(r.n_patches)});
    }
    out.close();
}

std::vector<fs::path> plot_track(const fs::path& out_dir, const std::string& prefix, const std::vector<TrackRow>& rows) {
    struct Metric {
        const char* name;
        const char* label;
        double MetricReport::*mean;
    };
    static constexpr Metric metrics[] = {{"ssim", "SSIM", &MetricReport::ssim_mean},
                                         {"msssim", "MS-SSIM", &MetricReport::msssim_mean},
                                         {"auc", "AUC-ROC", &MetricReport::auc_mean}};
    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    for (const auto& m : metrics) {
        LinePlot plot;
        plot.title = prefix + " " + m.label;
        plot.x_label = "epoch";
        plot.y_label = std::string(m.label) + " x100";
        PlotSeries s;
        s.label = m.label;
        for (const auto& row : rows) {
            s.x.push_back(row.epoch);
            s.y.push_back(row.report.*(m.mean));
        }
        plot.series.push_back(std::move(s));
        const fs::path file = out_dir / (prefix + "_" + m.name + ".png");
        write_line_plot(file, plot);
        written.push_back(file);
    }
    return written;
}

}  // namespace hcs::neural
