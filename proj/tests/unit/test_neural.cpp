#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include <torch/torch.h>

#include "hcs/csv.hpp"
#include "hcs/errors.hpp"
#include "hcs/kernels.hpp"
#include "hcs/neural/augment.hpp"
#include "hcs/neural/enhance.hpp"
#include "hcs/neural/losses.hpp"
#include "hcs/neural/networks.hpp"
#include "hcs/neural/track.hpp"
#include "hcs/neural/train_config.hpp"
#include "hcs/neural/trainer.hpp"
#include "hcs/synth.hpp"
#include "oracles.hpp"
#include "tempdir.hpp"

using namespace hcs;
using namespace hcs::neural;

namespace {

TrainConfig tiny_config() {
    TrainConfig c;
    c.generator.base_width = 4;
    c.generator.n_res_blocks = 1;
    c.discriminator.base_width = 4;
    c.batch_size = 2;
    c.crop = 32;
    c.load_side = 40;
    c.epochs_const = 2;
    c.epochs_decay = 2;
    c.seed = 5;
    return c;
}

std::vector<ImagePatch> tiny_domain(std::uint64_t seed, int n, int size = 48) {
    CellStyle style;
    style.size = size;
    style.nucleus_radius_lo = 6;
    style.nucleus_radius_hi = 8;
    style.min_filaments = 10;
    style.max_filaments = 20;
    std::vector<ImagePatch> out;
    for (int i = 0; i < n; ++i) {
        auto p = synth_cell(seed + i, style);
        p.meta.source_image_id = "c" + std::to_string(seed) + "x" + std::to_string(i);
        out.push_back(p);
    }
    return out;
}

double max_abs_diff(const torch::Tensor& a, const torch::Tensor& b) { return (a - b).abs().max().item<double>(); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST(Networks, GeneratorPreservesShape) {
    torch::manual_seed(0);
    GeneratorSpec spec;
    spec.base_width = 4;
    spec.n_res_blocks = 2;
    auto g = build_generator(spec);
    for (int side : {8, 32, 84}) {
        const auto y = g->forward(torch::randn({2, 2, side, side}));
        EXPECT_EQ(y.sizes(), (std::vector<int64_t>{2, 2, side, side}));
        EXPECT_LE(y.abs().max().item<double>(), 1.0);
    }
    EXPECT_THROW(g->forward(torch::randn({1, 2, 10, 10})), ShapeError);
    EXPECT_THROW(g->forward(torch::randn({1, 3, 16, 16})), ShapeError);
}

TEST(Networks, DiscriminatorMapSideMatchesForward) {
    torch::manual_seed(0);
    for (int layers : {2, 3, 4}) {
        DiscriminatorSpec spec;
        spec.base_width = 4;
        spec.n_layers = layers;
        auto d = build_discriminator(spec);
        for (int side : {32, 40, 64, 70, 128}) {
            const int expect = patch_map_side(side, layers);
            if (expect < 1) continue;
            const auto y = d->forward(torch::randn({1, 2, side, side}));
            EXPECT_EQ(y.size(1), 1);
            EXPECT_EQ(y.size(2), expect) << side << " " << layers;
            EXPECT_EQ(y.size(3), expect);
        }
    }
}

TEST(Networks, PatchGanReceptiveField) {
    EXPECT_EQ(receptive_field(4), 70);
    EXPECT_EQ(patch_map_side(128, 4), 14);
    EXPECT_EQ(patch_map_side(16, 4), 0);
    EXPECT_THROW(receptive_field(1), ParameterError);
}

TEST(Networks, InitIsSeeded) {
    GeneratorSpec spec;
    spec.base_width = 4;
    spec.n_res_blocks = 1;
    torch::manual_seed(3);
    auto a = build_generator(spec);
    torch::manual_seed(3);
    auto b = build_generator(spec);
    const auto pa = a->parameters();
    const auto pb = b->parameters();
    ASSERT_EQ(pa.size(), pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_TRUE(torch::equal(pa[i], pb[i]));
}

TEST(Losses, LogFormClosedForm) {
    const std::vector<double> r{2.0, -1.0, 0.5}, f{-3.0, 0.25};
    const auto real = torch::tensor(r, torch::kFloat64);
    const auto fake = torch::tensor(f, torch::kFloat64);
    double ld = 0.0, lg = 0.0;
    for (double x : r) ld -= std::log(sigmoid(x)) / r.size();
    for (double x : f) ld -= std::log(1.0 - sigmoid(x)) / f.size();
    for (double x : f) lg -= std::log(sigmoid(x)) / f.size();
    const auto t = gan_loss(real, fake, AdversarialLoss::Log);
    EXPECT_NEAR(t.loss_d.item<double>(), ld, 1e-12);
    EXPECT_NEAR(t.loss_g.item<double>(), lg, 1e-12);
    EXPECT_NEAR(discriminator_loss(real, fake).item<double>(), ld, 1e-12);
    EXPECT_NEAR(generator_adversarial_loss(fake).item<double>(), lg, 1e-12);
}

TEST(Losses, LeastSquaresClosedForm) {
    const auto real = torch::tensor({1.5, 0.0}, torch::kFloat64);
    const auto fake = torch::tensor({0.5, -1.0, 2.0}, torch::kFloat64);
    const double ld = (0.25 + 1.0) / 2 + (0.25 + 1.0 + 4.0) / 3;
    const double lg = (0.25 + 4.0 + 1.0) / 3;
    const auto t = gan_loss(real, fake, AdversarialLoss::LeastSquares);
    EXPECT_NEAR(t.loss_d.item<double>(), ld, 1e-12);
    EXPECT_NEAR(t.loss_g.item<double>(), lg, 1e-12);
}

TEST(Losses, ClampedAtSaturation) {
    const auto t = gan_loss(torch::tensor({-1e4}, torch::kFloat64), torch::tensor({1e4}, torch::kFloat64));
    EXPECT_TRUE(std::isfinite(t.loss_d.item<double>()));
    EXPECT_NEAR(t.loss_d.item<double>(), -2.0 * std::log(kProbEps), 1e-3);
}

TEST(Losses, GradientOfLogLossMatchesAnalytic) {
    auto fake = torch::tensor({-0.7, 0.3, 1.9}, torch::TensorOptions(torch::kFloat64).requires_grad(true));
    generator_adversarial_loss(fake).backward();
    for (int i = 0; i < 3; ++i) {
        const double x = fake[i].item<double>();
        EXPECT_NEAR(fake.grad()[i].item<double>(), -(1.0 - sigmoid(x)) / 3.0, 1e-12);
    }
}

TEST(Losses, ParseNames) {
    EXPECT_EQ(parse_adversarial_loss(to_string(AdversarialLoss::LeastSquares)), AdversarialLoss::LeastSquares);
    EXPECT_EQ(parse_adversarial_loss(to_string(AdversarialLoss::Log)), AdversarialLoss::Log);
    EXPECT_THROW(parse_adversarial_loss("hinge"), ParameterError);
}

TEST(Losses, CycleAndPaired) {
    const auto a = torch::randn({2, 2, 8, 8}, torch::kFloat64);
    const auto b = torch::randn({2, 2, 8, 8}, torch::kFloat64);
    auto plus = [](const torch::Tensor& x) { return x + 1.0; };
    auto minus = [](const torch::Tensor& x) { return x - 1.0; };
    auto twice = [](const torch::Tensor& x) { return 2.0 * x; };
    EXPECT_NEAR(cycle_loss(plus, minus, a, b).item<double>(), 0.0, 1e-12);
    const double expect = a.abs().mean().item<double>() * 3.0 + b.abs().mean().item<double>() * 3.0;
    EXPECT_NEAR(cycle_loss(twice, twice, a, b).item<double>(), expect, 1e-12);
    EXPECT_NEAR(l1_paired_loss(plus, a, a).item<double>(), 1.0, 1e-12);
    EXPECT_THROW(l1_paired_loss(plus, a, b.slice(0, 0, 1)), ShapeError);
}

TEST(Gradients, GeneratorFiniteDifferences) {
    torch::manual_seed(1);
    GeneratorSpec spec;
    spec.base_width = 2;
    spec.n_res_blocks = 1;
    auto g = build_generator(spec);
    g->to(torch::kFloat64);
    const auto x = torch::randn({1, 2, 8, 8}, torch::kFloat64);
    const auto y = torch::randn({1, 2, 8, 8}, torch::kFloat64);
    auto loss_of = [&] { return (g->forward(x) - y).pow(2).mean(); };
    g->zero_grad();
    loss_of().backward();
    std::mt19937_64 rng(2);
    torch::NoGradGuard no_grad;
    int checked = 0;
    for (auto& p : g->parameters()) {
        auto flat = p.view(-1);
        const auto grad = p.grad().view(-1);
        for (int k = 0; k < 3; ++k) {
            const int64_t i = static_cast<int64_t>(rng() % static_cast<std::uint64_t>(flat.numel()));
            const double old = flat[i].item<double>();
            const double h = 1e-6;
            flat[i] = old + h;
            const double up = loss_of().item<double>();
            flat[i] = old - h;
            const double down = loss_of().item<double>();
            flat[i] = old;
            const double numeric = (up - down) / (2 * h);
            EXPECT_NEAR(grad[i].item<double>(), numeric, 1e-6 + 1e-4 * std::abs(numeric));
            ++checked;
        }
    }
    EXPECT_GT(checked, 10);
}

TEST(Gradients, DiscriminatorFiniteDifferences) {
    torch::manual_seed(4);
    DiscriminatorSpec spec;
    spec.base_width = 2;
    auto d = build_discriminator(spec);
    d->to(torch::kFloat64);
    const auto real = torch::randn({1, 2, 32, 32}, torch::kFloat64);
    const auto fake = torch::randn({1, 2, 32, 32}, torch::kFloat64);
    auto loss_of = [&] { return discriminator_loss(d->forward(real), d->forward(fake)); };
    d->zero_grad();
    loss_of().backward();
    torch::NoGradGuard no_grad;
    std::mt19937_64 rng(5);
    for (auto& p : d->parameters()) {
        auto flat = p.view(-1);
        const auto grad = p.grad().view(-1);
        const int64_t i = static_cast<int64_t>(rng() % static_cast<std::uint64_t>(flat.numel()));
        const double old = flat[i].item<double>();
        flat[i] = old + 1e-6;
        const double up = loss_of().item<double>();
        flat[i] = old - 1e-6;
        const double down = loss_of().item<double>();
        flat[i] = old;
        const double numeric = (up - down) / 2e-6;
        EXPECT_NEAR(grad[i].item<double>(), numeric, 1e-6 + 1e-4 * std::abs(numeric));
    }
}

TEST(TrainConfigTest, LearningRateSchedule) {
    TrainConfig c;
    c.lr0 = 0.0002;
    c.epochs_const = 20;
    c.epochs_decay = 20;
    EXPECT_DOUBLE_EQ(lr_at_epoch(0, c), 0.0002);
    EXPECT_DOUBLE_EQ(lr_at_epoch(19, c), 0.0002);
    EXPECT_NEAR(lr_at_epoch(20, c), 0.0002, 1e-15);
    EXPECT_NEAR(lr_at_epoch(30, c), 0.0001, 1e-15);
    EXPECT_NEAR(lr_at_epoch(40, c), 0.0, 1e-15);
    for (int e = 20; e < 40; ++e) EXPECT_GT(lr_at_epoch(e, c), lr_at_epoch(e + 1, c));
    EXPECT_THROW(lr_at_epoch(-1, c), ParameterError);
    EXPECT_THROW(lr_at_epoch(41, c), ParameterError);
}

TEST(TrainConfigTest, JsonRoundTripAndStrictness) {
    TrainConfig c = tiny_config();
    c.identity_weight = 0.5;
    c.adversarial = AdversarialLoss::LeastSquares;
    const TrainConfig back = train_config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
    EXPECT_THROW(train_config_from_json(Json::parse(R"({"lamda_cyc": 3})")), ConfigError);
    EXPECT_THROW(train_config_from_json(Json::parse(R"({"batch_size": "8"})")), ConfigError);
    EXPECT_THROW(train_config_from_json(Json::parse(R"({"lr0": -1})")), ConfigError);
}

TEST(TrainConfigTest, Validation) {
    TrainConfig c = tiny_config();
    c.crop = 30;
    EXPECT_THROW(validate(c), ParameterError);
    c = tiny_config();
    c.crop = 64;
    EXPECT_THROW(validate(c), ParameterError);
    c = tiny_config();
    c.batch_size = 0;
    EXPECT_THROW(validate(c), ParameterError);
    c = tiny_config();
    c.lambda_cyc = -1;
    EXPECT_THROW(validate(c), ParameterError);
    EXPECT_NO_THROW(validate(tiny_config()));
}

TEST(Augment, FullCropIsDeterministicAndScaled) {
    auto p = synth_cell(3);
    p.meta.source_image_id = "a";
    const auto a = augment(p, 128, 128, Rng{1});
    const auto b = augment(p, 128, 128, Rng{2});
    EXPECT_EQ(a.tubule, b.tubule);
    for (std::size_t i = 0; i < a.tubule.size(); ++i)
        EXPECT_NEAR(a.tubule.pixels()[i], p.tubule.pixels()[i] / 127.5 - 1.0, 1e-12);
    EXPECT_THROW(augment(p, 64, 65, Rng{1}), ParameterError);
}

TEST(Augment, ChannelsCroppedTogether) {
    std::mt19937_64 rng(6);
    ImagePatch p;
    p.tubule = oracle::random_image(rng, 64, 64);
    p.nucleus = p.tubule;
    p.meta.source_image_id = "x";
    std::set<double> corners;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto c = augment(p, 64, 40, Rng{s});
        EXPECT_EQ(c.tubule.height(), 40);
        EXPECT_EQ(c.nucleus, c.tubule);
        EXPECT_GE(c.tubule.min(), -1.0);
        EXPECT_LE(c.tubule.max(), 1.0);
        corners.insert(c.tubule(0, 0));
        EXPECT_EQ(augment(p, 64, 40, Rng{s}).tubule, c.tubule);
    }
    EXPECT_GT(corners.size(), 5u);
}

TEST(Augment, TensorRoundTrip) {
    const auto d = tiny_domain(1, 3);
    std::vector<ImagePatch> norm;
    for (const auto& p : d) norm.push_back(normalize_full(p, 48));
    const auto t = to_tensor(norm, torch::kFloat64);
    EXPECT_EQ(t.sizes(), (std::vector<int64_t>{3, 2, 48, 48}));
    const auto back = from_tensor(t, 1);
    for (std::size_t i = 0; i < back.tubule.size(); ++i)
        EXPECT_DOUBLE_EQ(back.tubule.pixels()[i], norm[1].tubule.pixels()[i]);
    EXPECT_NEAR(from_unit_range(to_unit_range(37.0)), 37.0, 1e-12);
}

TEST(Trainer, BatchIndicesCoverEachEpoch) {
    std::multiset<std::size_t> seen;
    for (int s = 0; s < 5; ++s)
        for (auto i : batch_indices(7, 2, s, "a", 10, 2)) seen.insert(i);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(seen.count(i), 1u);
    EXPECT_EQ(batch_indices(7, 2, 1, "a", 10, 2), batch_indices(7, 2, 1, "a", 10, 2));
    EXPECT_NE(batch_indices(7, 2, 0, "a", 10, 4), batch_indices(7, 3, 0, "a", 10, 4));
    EXPECT_THROW(batch_indices(7, 0, 0, "a", 0, 2), DataError);
}

TEST(Trainer, CheckpointRoundTrip) {
    hcs::testing::TempDir dir;
    TrainConfig c = tiny_config();
    CycleGan model(c);
    const auto a = to_tensor({normalize_full(tiny_domain(1, 1)[0], 32)}) ;
    model.step(torch::cat({a, a}), torch::cat({a, a}));
    model.save(dir / "m.pt", 3, 17);
    CheckpointHeader h;
    CycleGan back = CycleGan::load(dir / "m.pt", &h);
    EXPECT_EQ(h.kind, ModelKind::CycleGan);
    EXPECT_EQ(h.epoch, 3);
    EXPECT_EQ(h.iteration, 17);
    EXPECT_EQ(to_json(h.config), to_json(c));
    torch::NoGradGuard no_grad;
    model.g_ab->eval();
    back.g_ab->eval();
    EXPECT_EQ(max_abs_diff(model.g_ab->forward(a), back.g_ab->forward(a)), 0.0);
    EXPECT_THROW(Pix2Pix::load(dir / "m.pt"), DataError);
}

TEST(Trainer, SameSeedSameWeights) {
    TrainConfig c = tiny_config();
    CycleGan a(c), b(c);
    const auto pa = a.g_ab->parameters();
    const auto pb = b.g_ab->parameters();
    for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_TRUE(torch::equal(pa[i], pb[i]));
    c.seed = 6;
    CycleGan other(c);
    EXPECT_FALSE(torch::equal(pa[0], other.g_ab->parameters()[0]));
}

TEST(Trainer, CycleGanResumeMatchesStraightRun) {
    hcs::testing::TempDir dir;
    const auto da = tiny_domain(10, 4);
    const auto db = tiny_domain(20, 3);
    TrainConfig c = tiny_config();
    c.identity_weight = 0.5;
    c.threads = 1;
    const auto full = train_cyclegan(da, db, c, {dir / "full", std::nullopt});
    ASSERT_EQ(full.checkpoints.size(), 4u);
    EXPECT_EQ(full.checkpoints.back().iteration, 8);

    TrainConfig part = c;
    part.max_epochs = 2;
    train_cyclegan(da, db, part, {dir / "part", std::nullopt});
    const auto resumed = train_cyclegan(da, db, c, {dir / "part", checkpoint_path(dir / "part", 2)});
    ASSERT_EQ(resumed.checkpoints.size(), 2u);

    CycleGan x = CycleGan::load(full.checkpoints.back().path);
    CycleGan y = CycleGan::load(resumed.checkpoints.back().path);
    const auto px = x.g_ab->parameters();
    const auto py = y.g_ab->parameters();
    for (std::size_t i = 0; i < px.size(); ++i) EXPECT_LE(max_abs_diff(px[i], py[i]), 1e-6);
    const auto log_full = read_csv(dir / "full" / kTrainLogFile);
    const auto log_part = read_csv(dir / "part" / kTrainLogFile);
    ASSERT_EQ(log_full.size(), 9u);
    EXPECT_EQ(log_full.front().back(), "loss_idt");
    EXPECT_EQ(log_full, log_part);

    TrainConfig changed = c;
    changed.lr0 = 0.001;
    EXPECT_THROW(train_cyclegan(da, db, changed, {dir / "bad", checkpoint_path(dir / "part", 2)}), ConfigError);
}

TEST(Trainer, Pix2PixRunsAndEnhances) {
    hcs::testing::TempDir dir;
    const auto clean = tiny_domain(30, 3, 96);
    std::vector<std::pair<ImagePatch, ImagePatch>> pairs;
    for (const auto& p : clean) {
        ImagePatch x = p;
        x.tubule = gaussian_convolve(p.tubule, 2.0);
        pairs.emplace_back(x, p);
    }
    TrainConfig c = tiny_config();
    c.load_side = 96;
    c.max_epochs = 1;
    c.save_initial = true;
    const auto series = train_pix2pix(pairs, c, {dir.path(), std::nullopt});
    ASSERT_EQ(series.checkpoints.size(), 2u);
    EXPECT_EQ(series.checkpoints.front().epoch, 0);
    EXPECT_EQ(scan_checkpoints(dir.path()).checkpoints.size(), 2u);
    EXPECT_EQ(read_checkpoint_header(series.checkpoints.back().path).kind, ModelKind::Pix2Pix);
    const auto log = read_csv(dir / kTrainLogFile);
    EXPECT_EQ(log.front(), (CsvRow{"iteration", "epoch", "loss_G_adv", "loss_l1", "loss_G", "loss_D", "lr"}));

    const Enhancer e = Enhancer::from_checkpoint(series.checkpoints.back().path);
    EXPECT_EQ(e.side(), 96);
    const auto out = e.enhance(pairs[0].first);
    EXPECT_EQ(out.tubule.height(), 96);
    EXPECT_EQ(out.tubule.type(), PixelType::UInt8);
    EXPECT_EQ(out.meta, pairs[0].first.meta);
    EXPECT_EQ(e.enhance(pairs[0].first).tubule, out.tubule);
    const auto many = e.enhance(std::vector<ImagePatch>{pairs[1].first, pairs[0].first}, 1);
    for (std::size_t i = 0; i < out.tubule.size(); ++i)
        EXPECT_LE(std::abs(many[1].tubule.pixels()[i] - out.tubule.pixels()[i]), 1.0);

    std::vector<ImagePatch> degraded, gt;
    for (const auto& [x, y] : pairs) {
        degraded.push_back(x);
        gt.push_back(y);
    }
    const auto rows = track_training(series, degraded, gt, "blur");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].epoch, 1);
    EXPECT_EQ(rows[1].report.n_patches, 3);
    write_track_csv(dir / "track.csv", rows);
    EXPECT_EQ(read_csv(dir / "track.csv").size(), 3u);
}

TEST(Trainer, EmptyDomainRejected) {
    hcs::testing::TempDir dir;
    EXPECT_THROW(train_cyclegan({}, tiny_domain(1, 2), tiny_config(), {dir.path(), std::nullopt}), DataError);
}
