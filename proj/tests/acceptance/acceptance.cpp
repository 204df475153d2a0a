// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run every criterion
//   acceptance 3 7        run the listed criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "hcs/csv.hpp"
#include "hcs/degrade.hpp"
#include "hcs/evaluate.hpp"
#include "hcs/kernels.hpp"
#include "hcs/metrics.hpp"
#include "hcs/neural/enhance.hpp"
#include "hcs/neural/losses.hpp"
#include "hcs/neural/networks.hpp"
#include "hcs/neural/train_config.hpp"
#include "hcs/neural/trainer.hpp"
#include "hcs/quantify.hpp"
#include "hcs/restore.hpp"
#include "hcs/rng.hpp"
#include "hcs/synth.hpp"
#include "oracles.hpp"
#include "tempdir.hpp"

namespace fs = std::filesystem;
using namespace hcs;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

ImagePatch named(ImagePatch p, const std::string& id) {
    p.meta.source_image_id = id;
    return p;
}

// ------------------------------------------------------------------ 1

Outcome degradation_oracle() {
    std::mt19937_64 rng(101);
    long pixels = 0;
    long within = 0;
    double worst = 0.0;
    for (const auto& base : standard_suite()) {
        for (int trial = 0; trial < 50; ++trial) {
            const ImagePatch cell = named(synth_cell(rng()), "f" + std::to_string(trial));
            DegradationSpec s = base;
            s.noise_scale = 0.0;
            std::uniform_real_distribution<double> u(base.p.lo, base.p.hi);
            const double p = base.p.uniform ? u(rng) : base.p.lo;
            s.p = MixWeight::fixed(p);
            const ImagePatch out = degrade(cell, s, Rng{rng()});

            const Image2D t = oracle::bilinear(cell.tubule, s.output_side, s.output_side);
            const Image2D fine = oracle::gaussian_direct(t, s.sigma_fine);
            Image2D coarse;
            if (s.kind == DegradationCase::Bleed)
                coarse = oracle::gaussian_direct(oracle::bilinear(cell.nucleus, s.output_side, s.output_side),
                                                 s.sigma_coarse);
            if (s.kind == DegradationCase::Diffuse) coarse = oracle::gaussian_direct(t, s.sigma_coarse);
            for (std::size_t i = 0; i < fine.size(); ++i) {
                double v = fine.pixels()[i];
                if (s.kind == DegradationCase::Bleed) v += p * coarse.pixels()[i];
                if (s.kind == DegradationCase::Diffuse) v = (1.0 - p) * v + p * coarse.pixels()[i];
                const double d = std::abs(out.tubule.pixels()[i] - oracle::round_uint8(v));
                worst = std::max(worst, d);
                ++pixels;
                if (d <= 1.0) ++within;
            }
        }
    }
    return {within == pixels, std::to_string(within) + "/" + std::to_string(pixels) +
                                  " pixels within 1 level over 7 cases x 50 fixtures, worst " + fmt(worst)};
}

// ------------------------------------------------------------------ 2

Outcome metric_oracles() {
    std::mt19937_64 rng(202);
    double worst_ssim = 0.0;
    double worst_ms = 0.0;
    for (int k = 0; k < 20; ++k) {
        const ImagePatch cell = named(synth_cell(rng()), "m" + std::to_string(k));
        DegradationSpec s = standard_suite()[static_cast<std::size_t>(k) % 7];
        s.output_side = 0;
        const ImagePatch deg = degrade(cell, s, Rng{rng()});
        worst_ssim = std::max(worst_ssim, std::abs(ssim(cell.tubule, deg.tubule) -
                                                   oracle::ssim_windows(cell.tubule, deg.tubule).ssim));
        worst_ms = std::max(worst_ms, std::abs(msssim(cell.tubule, deg.tubule, 4) -
                                               oracle::msssim_scales(cell.tubule, deg.tubule, 4)));
    }
    double worst_auc = 0.0;
    int done = 0;
    while (done < 50) {
        const Image2D gt = oracle::random_uint8_image(rng, 12, 12);
        if (gt.min() == gt.max()) continue;
        const Image2D score = oracle::random_uint8_image(rng, 12, 12, 0, 15 + 20 * (done % 10));
        worst_auc = std::max(worst_auc, std::abs(auc_roc(gt, score) - oracle::auc_pairwise(gt, score)));
        ++done;
    }
    const bool pass = worst_ssim <= 1e-6 && worst_ms <= 1e-6 && worst_auc <= 1e-12;
    return {pass, "max |ssim diff| " + fmt(worst_ssim) + ", max |msssim diff| " + fmt(worst_ms) +
                      ", max |auc diff| " + fmt(worst_auc)};
}

// ------------------------------------------------------------------ 3

Outcome richardson_lucy_gain() {
    int better = 0;
    double worst_flux = 0.0;
    std::ostringstream gains;
    for (int k = 0; k < 10; ++k) {
        const Image2D x = synth_cell(3000 + static_cast<std::uint64_t>(k)).tubule;
        const Image2D y = gaussian_convolve(x, 1.0);
        const Image2D r = richardson_lucy(y, 1.0, 30);
        const double before = oracle::correlation(y, x);
        const double after = oracle::correlation(r, x);
        if (after > before) ++better;
        worst_flux = std::max(worst_flux, std::abs(r.sum() / y.sum() - 1.0));
        gains << (k ? " " : "") << fmt(after - before, 2);
    }
    return {better >= 9 && worst_flux < 0.01, std::to_string(better) + "/10 improved (gains " + gains.str() +
                                                  "), max flux error " + fmt(worst_flux)};
}

// ------------------------------------------------------------------ 4

Outcome otsu_equivalence() {
    std::mt19937_64 rng(404);
    int agree = 0;
    int trials = 0;
    while (trials < 100) {
        std::uniform_int_distribution<int> bound(0, 255);
        int lo = bound(rng);
        int hi = bound(rng);
        if (lo > hi) std::swap(lo, hi);
        if (hi - lo < 2) continue;
        Image2D img = oracle::random_uint8_image(rng, 24 + trials % 17, 31, lo, hi);
        if (trials % 3 == 0) {
            // Bimodal images exercise a well-separated optimum.
            std::normal_distribution<double> a(lo + 0.25 * (hi - lo), 6.0), b(lo + 0.75 * (hi - lo), 6.0);
            for (double& v : img.pixels())
                v = std::clamp(std::nearbyint(rng() % 2 ? a(rng) : b(rng)), double(lo), double(hi));
        }
        if (img.min() == img.max()) continue;
        const double t = otsu_threshold(img);
        const int t_sweep = oracle::otsu_sweep_uint8(img);
        bool same = true;
        for (double v : img.pixels()) same = same && ((v > t) == (v > t_sweep));
        if (same) ++agree;
        ++trials;
    }
    return {agree == 100, std::to_string(agree) + "/100 images split identically"};
}

// ------------------------------------------------------------------ 5

struct GradStats {
    int sampled = 0;
    int within = 0;
    double worst = 0.0;
};

// Compares autograd against central differences on a random sample of the
// entries of `params`; `loss` must evaluate in double precision.
GradStats check_gradients(const std::vector<torch::Tensor>& params, const std::function<torch::Tensor()>& loss,
                          int samples, std::mt19937_64& rng) {
    for (auto p : params)
        if (p.grad().defined()) p.mutable_grad().zero_();
    loss().backward();
    GradStats st;
    torch::NoGradGuard no_grad;
    std::vector<std::pair<std::size_t, int64_t>> picks;
    int64_t total = 0;
    for (const auto& p : params) total += p.numel();
    std::uniform_int_distribution<int64_t> pick(0, total - 1);
    for (int k = 0; k < samples; ++k) {
        int64_t flat = pick(rng);
        std::size_t which = 0;
        while (flat >= params[which].numel()) flat -= params[which++].numel();
        picks.emplace_back(which, flat);
    }
    const double h = 1e-6;
    for (const auto& [which, i] : picks) {
        auto flat = params[which].view(-1);
        const double analytic = params[which].grad().view(-1)[i].item<double>();
        const double old = flat[i].item<double>();
        flat[i] = old + h;
        const double up = loss().item<double>();
        flat[i] = old - h;
        const double down = loss().item<double>();
        flat[i] = old;
        const double numeric = (up - down) / (2.0 * h);
        const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        ++st.sampled;
        if (rel < 1e-3) ++st.within;
        st.worst = std::max(st.worst, rel);
    }
    return st;
}

Outcome gradient_checks() {
    torch::manual_seed(505);
    std::mt19937_64 rng(505);
    neural::GeneratorSpec gs;
    gs.base_width = 4;
    gs.n_res_blocks = 1;
    neural::DiscriminatorSpec ds;
    ds.base_width = 4;
    ds.n_layers = 2;
    auto g1 = neural::build_generator(gs);
    auto g2 = neural::build_generator(gs);
    auto d = neural::build_discriminator(ds);
    for (torch::nn::Module* m : std::vector<torch::nn::Module*>{g1.get(), g2.get(), d.get()}) m->to(torch::kFloat64);
    const auto a = torch::rand({2, 2, 8, 8}, torch::kFloat64) * 2 - 1;
    const auto b = torch::rand({2, 2, 8, 8}, torch::kFloat64) * 2 - 1;
    auto f1 = [&](const torch::Tensor& x) { return g1->forward(x); };
    auto f2 = [&](const torch::Tensor& x) { return g2->forward(x); };

    std::vector<torch::Tensor> both = g1->parameters();
    for (const auto& p : g2->parameters()) both.push_back(p);

    std::vector<std::pair<std::string, GradStats>> parts;
    parts.emplace_back("gan_loss(G)", check_gradients(
                                          g1->parameters(),
                                          [&] { return neural::generator_adversarial_loss(d->forward(f1(a))); },
                                          300, rng));
    parts.emplace_back("cycle_loss",
                       check_gradients(both, [&] { return neural::cycle_loss(f1, f2, a, b); }, 300, rng));
    parts.emplace_back("l1_paired_loss",
                       check_gradients(g1->parameters(), [&] { return neural::l1_paired_loss(f1, a, b); }, 300, rng));
    bool pass = true;
    std::string detail;
    for (const auto& [name, st] : parts) {
        const double frac = static_cast<double>(st.within) / st.sampled;
        pass = pass && frac >= 0.99;
        detail += (detail.empty() ? "" : "; ") + name + " " + std::to_string(st.within) + "/" +
                  std::to_string(st.sampled) + " below 1e-3";
    }
    return {pass, detail};
}

// ------------------------------------------------------------------ 6

Outcome lr_schedule() {
    neural::TrainConfig c;
    bool pass = true;
    for (int e = 0; e <= 19; ++e) pass = pass && neural::lr_at_epoch(e, c) == 0.0002;
    pass = pass && neural::lr_at_epoch(40, c) == 0.0 && neural::lr_at_epoch(30, c) == 0.0001;
    return {pass, "epochs 0-19 -> " + fmt(neural::lr_at_epoch(0, c)) + ", epoch 30 -> " +
                      fmt(neural::lr_at_epoch(30, c)) + ", epoch 40 -> " + fmt(neural::lr_at_epoch(40, c))};
}

// ------------------------------------------------------------------ 7

ImagePatch degrade_case1(const ImagePatch& clean, std::uint64_t seed) {
    const DegradationSpec s = standard_suite()[0];
    return degrade(clean, s, patch_stream(seed, clean.meta.patch_id(), s.name));
}

Outcome toy_training_signal() {
    const std::uint64_t seed = 707;
    auto binned_cell = [&](const std::string& domain, int i) {
        ImagePatch p = named(synth_cell(derive_seed(seed, {domain, std::to_string(i)})), domain + std::to_string(i));
        p.nucleus = to_uint8(p.nucleus);
        p.tubule = to_uint8(p.tubule);
        return p;
    };
    std::vector<ImagePatch> target, source, held_clean, held_degraded;
    for (int i = 0; i < 256; ++i) target.push_back(binned_cell("target", i));
    for (int i = 0; i < 256; ++i) source.push_back(degrade_case1(binned_cell("source", i), seed));
    for (int i = 0; i < 32; ++i) {
        held_clean.push_back(binned_cell("held", i));
        held_degraded.push_back(degrade_case1(held_clean.back(), seed));
    }

    neural::TrainConfig cfg;
    cfg.generator.base_width = 16;
    cfg.discriminator.base_width = 16;
    cfg.epochs_const = 3;
    cfg.epochs_decay = 3;
    cfg.crop = 64;
    cfg.batch_size = 8;
    cfg.load_side = 128;
    cfg.lr0 = 0.0005;
    cfg.identity_weight = 0.5;
    cfg.seed = seed;

    hcs::testing::TempDir dir("hcs-accept7");
    const auto series = neural::train_cyclegan(source, target, cfg, {dir.path(), std::nullopt});
    const double degraded_auc = evaluate_testset(held_degraded, held_clean).auc_mean / 100.0;
    const auto enhancer = neural::Enhancer::from_checkpoint(series.checkpoints.back().path);
    const double enhanced_auc = evaluate_testset(enhancer.enhance(held_degraded), held_clean).auc_mean / 100.0;
    return {enhanced_auc >= 0.80 && enhanced_auc > degraded_auc,
            "held-out AUC enhanced " + fmt(enhanced_auc) + " vs degraded " + fmt(degraded_auc) +
                " after 6 epochs (256 vs 256 unpaired patches)"};
}

// ------------------------------------------------------------------ 8

Outcome pix2pix_identity() {
    std::vector<std::pair<ImagePatch, ImagePatch>> pairs;
    for (int i = 0; i < 100; ++i) {
        ImagePatch p = named(synth_cell(derive_seed(808, {std::to_string(i)})), "p" + std::to_string(i));
        p.nucleus = to_uint8(p.nucleus);
        p.tubule = to_uint8(p.tubule);
        pairs.emplace_back(p, p);
    }
    neural::TrainConfig cfg;  // defaults: 40 epochs of ceil(100 / 8) = 13 steps
    cfg.seed = 808;
    hcs::testing::TempDir dir("hcs-accept8");
    neural::train_pix2pix(pairs, cfg, {dir.path(), std::nullopt});
    const auto log = read_csv(dir / neural::kTrainLogFile);
    const auto col = std::find(log.front().begin(), log.front().end(), "loss_l1") - log.front().begin();
    if (log.size() < 501) return {false, "only " + std::to_string(log.size() - 1) + " steps logged"};
    const double l1_500 = std::stod(log[500][static_cast<std::size_t>(col)]);
    return {l1_500 < 0.05, "L1 at step 500 = " + fmt(l1_500)};
}

// ------------------------------------------------------------------ 9

Outcome density_fixtures() {
    const BinaryMask nuc = oracle::disk_mask(96, 96, 48, 48, 14);
    const BinaryMask ring = oracle::ring_bruteforce(nuc, 8);
    BinaryMask half(96, 96);
    for (int y = 0; y < 96; ++y)
        for (int x = 48; x < 96; ++x) half.set(y, x, true);
    const double full = perinuclear_density(BinaryMask(96, 96, true), nuc).density;
    const double empty = perinuclear_density(BinaryMask(96, 96, false), nuc).density;
    const auto h = perinuclear_density(half, nuc);
    bool rings = perinuclear_ring(nuc, 8) == ring && h.ring_px == static_cast<long>(ring.count());
    std::mt19937_64 rng(909);
    for (int k = 0; k < 10; ++k) {
        std::uniform_real_distribution<double> c(10, 40), r(3, 9);
        const BinaryMask n = oracle::disk_mask(50, 50, c(rng), c(rng), r(rng));
        for (int radius : {2, 5, 8}) rings = rings && perinuclear_ring(n, radius) == oracle::ring_bruteforce(n, radius);
    }
    const bool pass = full == 1.0 && empty == 0.0 && std::abs(h.density - 0.5) <= 0.02 && rings;
    return {pass, "full " + fmt(full) + ", empty " + fmt(empty) + ", half " + fmt(h.density) +
                      ", ring sizes " + (rings ? "match" : "differ from") + " brute force"};
}

// ------------------------------------------------------------------ 10

const char* const kPipeline[] = {"synth-fixtures", "simulate", "train-cyclegan", "restore",
                                 "evaluate",       "segment",  "quantify",       "dose-response"};

int run_cli(const fs::path& cfg, const std::string& run_id, const std::string& sub) {
    const std::string cmd = std::string("\"") + HCS_CLI_PATH + "\" " + sub + " -c \"" + cfg.string() +
                            "\" --run-id " + run_id + " --log-level warn";
    return std::system(cmd.c_str());
}

std::map<std::string, std::string> tree_digest(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file() || e.path().filename() == "provenance.json") continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        out[e.path().lexically_relative(root).generic_string()] = s.str();
    }
    return out;
}

Outcome pipeline_determinism() {
    hcs::testing::TempDir dir("hcs-accept10");
    const fs::path cfg = dir / "pipeline.json";
    std::ofstream(cfg) << R"({
  "output_root": "runs",
  "seed": 1010,
  "fixtures": {
    "patches": 24,
    "split": [0.5, 0.25, 0.25],
    "treatments": [
      {"compound": "DMSO", "concentration": "0", "mechanism": "control"},
      {"compound": "nocodazole", "concentration": "1", "mechanism": "Microtubule destabilizers", "filament_scale": 0.5},
      {"compound": "nocodazole", "concentration": "3", "mechanism": "Microtubule destabilizers", "filament_scale": 0.25}
    ]
  },
  "degrade": {"input": "@run/synth-fixtures", "cases": ["1"]},
  "cyclegan": {
    "source": "@run/simulate/1", "target": "@run/synth-fixtures",
    "generator": {"base_width": 4, "n_res_blocks": 1}, "discriminator": {"base_width": 4},
    "batch_size": 4, "crop": 32, "load_side": 64, "epochs_const": 1, "epochs_decay": 1, "threads": 1
  },
  "restore": {"input": "@run/simulate/1", "method": "cyclegan", "checkpoint": "@run/train-cyclegan", "split": "all"},
  "evaluate": {"restored": "@run/restore-cyclegan", "ground_truth": "@run/synth-fixtures"},
  "segment": {"input": "@run/restore-cyclegan"},
  "quantify": {"input": "@run/restore-cyclegan"},
  "dose_response": {"densities": "@run/quantify/densities.csv", "baseline_compounds": ["DMSO"], "per_combo_n": 4, "baseline_n": 4}
})";
    for (const std::string run : {"a", "b"})
        for (const char* sub : kPipeline)
            if (const int rc = run_cli(cfg, run, sub); rc != 0)
                return {false, std::string(sub) + " failed for run " + run + " (status " + std::to_string(rc) + ")"};
    const auto a = tree_digest(dir / "runs/a");
    const auto b = tree_digest(dir / "runs/b");
    std::vector<std::string> differing;
    for (const auto& [name, bytes] : a) {
        auto it = b.find(name);
        if (it == b.end() || it->second != bytes) differing.push_back(name);
    }
    const std::vector<std::string> required{"synth-fixtures/manifest.csv", "simulate/1/manifest.csv",
                                            "train-cyclegan/train_log.csv", "restore-cyclegan/manifest.csv",
                                            "evaluate/metrics.csv",         "quantify/densities.csv",
                                            "dose-response/dose_response.csv"};
    for (const auto& r : required)
        if (!a.contains(r)) differing.push_back("missing " + r);
    if (a.size() != b.size()) differing.push_back("file count");
    std::string detail = std::to_string(a.size()) + " files compared";
    if (!differing.empty()) detail += ", differing: " + differing.front() + (differing.size() > 1 ? " ..." : "");
    return {differing.empty(), detail};
}

// ------------------------------------------------------------------ 11

Outcome resume_equality() {
    std::vector<ImagePatch> a, b;
    CellStyle style;
    style.size = 48;
    style.nucleus_radius_lo = 6;
    style.nucleus_radius_hi = 8;
    style.min_filaments = 10;
    style.max_filaments = 20;
    for (int i = 0; i < 20; ++i) {
        a.push_back(named(synth_cell(1100 + i, style), "a" + std::to_string(i)));
        b.push_back(named(synth_cell(1200 + i, style), "b" + std::to_string(i)));
    }
    neural::TrainConfig cfg;
    cfg.generator.base_width = 4;
    cfg.generator.n_res_blocks = 1;
    cfg.discriminator.base_width = 4;
    cfg.batch_size = 2;
    cfg.crop = 32;
    cfg.load_side = 48;
    cfg.epochs_const = 10;
    cfg.epochs_decay = 10;
    cfg.threads = 1;
    cfg.seed = 1111;

    hcs::testing::TempDir dir("hcs-accept11");
    neural::train_cyclegan(a, b, cfg, {dir / "straight", std::nullopt});
    neural::TrainConfig first = cfg;
    first.max_epochs = 10;
    neural::train_cyclegan(a, b, first, {dir / "first", std::nullopt});
    neural::train_cyclegan(a, b, cfg, {dir / "second", neural::checkpoint_path(dir / "first", 10)});

    const auto straight = read_csv(dir / "straight" / neural::kTrainLogFile);
    const auto resumed = read_csv(dir / "second" / neural::kTrainLogFile);
    if (straight.size() != 201 || resumed.size() != 201)
        return {false, "log lengths " + std::to_string(straight.size()) + " / " + std::to_string(resumed.size())};
    double worst = 0.0;
    for (std::size_t r = 101; r < straight.size(); ++r)
        for (std::size_t c = 2; c < straight[r].size(); ++c)
            worst = std::max(worst, std::abs(std::stod(straight[r][c]) - std::stod(resumed[r][c])));
    return {worst <= 1e-6, "max |difference| over the 100 steps after resume = " + fmt(worst)};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "degradation oracle equivalence", 30, degradation_oracle},
    {2, "metric oracles", 60, metric_oracles},
    {3, "Richardson-Lucy", 60, richardson_lucy_gain},
    {4, "Otsu equivalence", 10, otsu_equivalence},
    {5, "gradient checks", 300, gradient_checks},
    {6, "lr schedule", 1, lr_schedule},
    {7, "toy training signal", 3 * 3600, toy_training_signal},
    {8, "pix2pix identity", 900, pix2pix_identity},
    {9, "density fixtures", 5, density_fixtures},
    {10, "determinism", 1800, pipeline_determinism},
    {11, "checkpoint resume", 600, resume_equality},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
    int failures = 0;
    for (const auto& c : kCriteria) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failures;
        std::printf("criterion %2d %s: %s (%.1f s of %.0f s) %s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs,
                    c.budget_s, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
