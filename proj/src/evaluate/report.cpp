#include "hcs/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "hcs/csv.hpp"
#include "hcs/errors.hpp"
#include "hcs/kernels.hpp"
#include "hcs/metrics.hpp"
#include "hcs/parallel.hpp"

namespace hcs {

PatchScores score_patch(const ImagePatch& restored, const ImagePatch& ground_truth) {
    const Image2D& gt = ground_truth.tubule;
    Image2D rec = restored.tubule;
    if (!rec.same_shape(gt)) rec = resize(rec, gt.height(), gt.width());
    PatchScores s;
    s.patch_id = ground_truth.meta.patch_id();
    s.ssim = ssim(rec, gt);
    s.msssim = msssim(rec, gt, kMsssimScales);
    s.auc = auc_roc(gt, rec);
    return s;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace

MetricReport aggregate(std::vector<PatchScores> scores, const std::string& method, const std::string& case_name) {
    if (scores.empty()) throw DataError("no patches to evaluate");
    std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return a.patch_id < b.patch_id; });
    std::vector<double> s;
    std::vector<double> m;
    std::vector<double> a;
    for (const auto& p : scores) {
        s.push_back(100.0 * p.ssim);
        m.push_back(100.0 * p.msssim);
        a.push_back(100.0 * p.auc);
    }
    MetricReport r;
    r.method = method;
    r.case_name = case_name;
    std::tie(r.ssim_mean, r.ssim_std) = mean_std(s);
    std::tie(r.msssim_mean, r.msssim_std) = mean_std(m);
    std::tie(r.auc_mean, r.auc_std) = mean_std(a);
    r.n_patches = static_cast<int>(scores.size());
    r.per_patch = std::move(scores);
    return r;
}

MetricReport evaluate_testset(const std::vector<ImagePatch>& restored, const std::vector<ImagePatch>& ground_truth,
                              const std::string& method, const std::string& case_name) {
    std::map<std::string, const ImagePatch*> truth;
    for (const auto& p : ground_truth) truth[p.meta.patch_id()] = &p;
    std::vector<const ImagePatch*> matched(restored.size());
    for (std::size_t i = 0; i < restored.size(); ++i) {
        const auto it = truth.find(restored[i].meta.patch_id());
        if (it == truth.end()) throw DataError("no ground truth for patch " + restored[i].meta.patch_id());
        matched[i] = it->second;
    }
    std::vector<PatchScores> scores(restored.size());
    parallel_for(restored.size(), [&](std::size_t i) { scores[i] = score_patch(restored[i], *matched[i]); });
    return aggregate(std::move(scores), method, case_name);
}

MetricReport evaluate_testset(const DatasetManifest& restored, const DatasetManifest& ground_truth,
                              const std::string& method, const std::string& case_name) {
    DatasetManifest needed = ground_truth;
    needed.entries.clear();
    for (const auto& e : restored.entries) {
        const ManifestEntry* g = ground_truth.find(e.meta.patch_id());
        if (!g) throw DataError("no ground truth for patch " + e.meta.patch_id());
        needed.entries.push_back(*g);
    }
    return evaluate_testset(load_patches(restored), load_patches(needed), method, case_name);
}

void write_metric_report(const std::filesystem::path& path, const std::vector<MetricReport>& reports) {
    CsvWriter out(path, {"method", "case", "metric", "mean", "std", "n"});
    for (const auto& r : reports) {
        const std::string n = std::to_string(r.n_patches);
        out.row({r.method, r.case_name, "ssim", format_real(r.ssim_mean), format_real(r.ssim_std), n});
        out.row({r.method, r.case_name, "msssim", format_real(r.msssim_mean), format_real(r.msssim_std), n});
        out.row({r.method, r.case_name, "auc", format_real(r.auc_mean), format_real(r.auc_std), n});
    }
    out.close();
}

void write_patch_scores(const std::filesystem::path& path, const MetricReport& report) {
    CsvWriter out(path, {"patch_id", "ssim", "msssim", "auc"});
    for (const auto& p : report.per_patch)
        out.row({p.patch_id, format_real(p.ssim), format_real(p.msssim), format_real(p.auc)});
    out.close();
}

}  // namespace hcs
