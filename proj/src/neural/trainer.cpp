#include "hcs/neural/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <regex>

#include "hcs/csv.hpp"
#include "hcs/errors.hpp"
#include "hcs/kernels.hpp"
#include "hcs/log.hpp"
#include "hcs/neural/augment.hpp"
#include "hcs/neural/losses.hpp"
#include "hcs/parallel.hpp"
#include "hcs/rng.hpp"

namespace hcs::neural {
namespace fs = std::filesystem;
using torch::serialize::InputArchive;
using torch::serialize::OutputArchive;

std::string to_string(ModelKind kind) { return kind == ModelKind::CycleGan ? "cyclegan" : "pix2pix"; }

fs::path checkpoint_path(const fs::path& run_dir, int epoch) {
    char name[32];
    std::snprintf(name, sizeof name, "epoch_%03d.pt", epoch);
    return run_dir / "checkpoints" / name;
}

CheckpointSeries scan_checkpoints(const fs::path& dir) {
    CheckpointSeries series;
    series.dir = fs::is_directory(dir / "checkpoints") ? dir / "checkpoints" : dir;
    if (!fs::is_directory(series.dir)) throw DataError("checkpoint directory not found: " + dir.string());
    static const std::regex pattern(R"(epoch_(\d+)\.pt)");
    for (const auto& entry : fs::directory_iterator(series.dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (!std::regex_match(name, m, pattern)) continue;
        const auto header = read_checkpoint_header(entry.path());
        series.checkpoints.push_back({header.epoch, header.iteration, entry.path()});
    }
    std::sort(series.checkpoints.begin(), series.checkpoints.end(),
              [](const auto& a, const auto& b) { return a.epoch < b.epoch; });
    return series;
}

namespace {

void set_requires_grad(torch::nn::Module& module, bool flag) {
    for (auto& p : module.parameters()) p.set_requires_grad(flag);
}

std::vector<torch::Tensor> joined_parameters(torch::nn::Module& a, torch::nn::Module& b) {
    auto params = a.parameters();
    for (auto& p : b.parameters()) params.push_back(p);
    return params;
}

std::unique_ptr<torch::optim::Adam> make_adam(std::vector<torch::Tensor> params, const TrainConfig& cfg) {
    return std::make_unique<torch::optim::Adam>(
        std::move(params),
        torch::optim::AdamOptions(cfg.lr0).betas({cfg.adam_betas.first, cfg.adam_betas.second}));
}

void set_adam_lr(torch::optim::Adam& opt, double lr) {
    for (auto& group : opt.param_groups()) static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
}

double checked(const torch::Tensor& loss, const char* name) {
    const double v = loss.item<double>();
    if (!std::isfinite(v)) throw DivergenceError(std::string("non-finite ") + name + " loss");
    return v;
}

void seed_torch(std::uint64_t seed) { torch::manual_seed(derive_seed(seed, {"torch-init"})); }

void write_header(OutputArchive& ar, ModelKind kind, const TrainConfig& cfg, int epoch, std::int64_t iteration) {
    ar.write("format", c10::IValue(std::string(kCheckpointFormat)));
    ar.write("kind", c10::IValue(to_string(kind)));
    ar.write("config", c10::IValue(to_json(cfg).dump()));
    ar.write("epoch", c10::IValue(static_cast<std::int64_t>(epoch)));
    ar.write("iteration", c10::IValue(iteration));
    auto gen = torch::globalContext().defaultGenerator(torch::kCPU);
    ar.write("rng_state", gen.get_state(), /*is_buffer=*/true);
}

void write_module(OutputArchive& ar, const std::string& key, const torch::nn::Module& module) {
    OutputArchive sub;
    module.save(sub);
    ar.write(key, sub);
}

// Adam moments stored per parameter position; libtorch's own serializer keys them by address.
void write_optimizer(OutputArchive& ar, const std::string& key, const torch::optim::Adam& opt) {
    OutputArchive sub;
    std::int64_t index = 0;
    for (const auto& group : opt.param_groups()) {
        for (const auto& p : group.params()) {
            const auto it = opt.state().find(p.unsafeGetTensorImpl());
            if (it != opt.state().end()) {
                const auto& st = static_cast<const torch::optim::AdamParamState&>(*it->second);
                const std::string k = std::to_string(index);
                sub.write(k + ".step", c10::IValue(st.step()));
                sub.write(k + ".exp_avg", st.exp_avg(), /*is_buffer=*/true);
                sub.write(k + ".exp_avg_sq", st.exp_avg_sq(), /*is_buffer=*/true);
            }
            ++index;
        }
    }
    sub.write("count", c10::IValue(index));
    ar.write(key, sub);
}

void read_module(InputArchive& ar, const std::string& key, torch::nn::Module& module) {
    InputArchive sub;
    ar.read(key, sub);
    module.load(sub);
}

void read_optimizer(InputArchive& ar, const std::string& key, torch::optim::Adam& opt) {
    InputArchive sub;
    ar.read(key, sub);
    c10::IValue count;
    sub.read("count", count);
    std::int64_t index = 0;
    for (auto& group : opt.param_groups())
        for (auto& p : group.params()) {
            const std::string k = std::to_string(index++);
            c10::IValue step;
            if (!sub.try_read(k + ".step", step)) continue;
            auto st = std::make_unique<torch::optim::AdamParamState>();
            torch::Tensor m, v;
            sub.read(k + ".exp_avg", m, /*is_buffer=*/true);
            sub.read(k + ".exp_avg_sq", v, /*is_buffer=*/true);
            st->step(step.toInt());
            st->exp_avg(m);
            st->exp_avg_sq(v);
            opt.state()[p.unsafeGetTensorImpl()] = std::move(st);
        }
    if (count.toInt() != index) throw ConfigError("checkpoint optimizer has " + std::to_string(count.toInt()) +
                                                  " parameters, model has " + std::to_string(index));
}

void save_archive(OutputArchive& ar, const fs::path& path) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    ar.save_to(tmp.string());
    fs::rename(tmp, path);
}

CheckpointHeader read_header(InputArchive& ar, const fs::path& path) {
    c10::IValue v;
    try {
        ar.read("format", v);
    } catch (const c10::Error&) {
        throw DataError("not a checkpoint: " + path.string());
    }
    if (!v.isString() || v.toStringRef() != kCheckpointFormat)
        throw DataError("unsupported checkpoint format in " + path.string());
    CheckpointHeader h;
    ar.read("kind", v);
    h.kind = v.toStringRef() == "pix2pix" ? ModelKind::Pix2Pix : ModelKind::CycleGan;
    ar.read("config", v);
    h.config = train_config_from_json(Json::parse(v.toStringRef()));
    ar.read("epoch", v);
    h.epoch = static_cast<int>(v.toInt());
    ar.read("iteration", v);
    h.iteration = v.toInt();
    return h;
}

void restore_rng(InputArchive& ar) {
    torch::Tensor state;
    ar.read("rng_state", state, /*is_buffer=*/true);
    auto gen = torch::globalContext().defaultGenerator(torch::kCPU);
    std::lock_guard<std::mutex> lock(gen.mutex());
    gen.set_state(state);
}

InputArchive open_archive(const fs::path& path) {
    if (!fs::exists(path)) throw DataError("checkpoint not found: " + path.string());
    InputArchive ar;
    try {
        ar.load_from(path.string());
    } catch (const c10::Error& e) {
        throw DataError("cannot read checkpoint " + path.string());
    }
    return ar;
}

}  // namespace

CheckpointHeader read_checkpoint_header(const fs::path& path) {
    InputArchive ar = open_archive(path);
    return read_header(ar, path);
}

// ---------------------------------------------------------------- CycleGAN

CycleGan::CycleGan(const TrainConfig& cfg) : cfg_(cfg) {
    cfg_.generator.in_channels = cfg_.generator.out_channels = 2;
    cfg_.discriminator.in_channels = 2;
    validate(cfg_);
    seed_torch(cfg_.seed);
    g_ab = build_generator(cfg_.generator);
    g_ba = build_generator(cfg_.generator);
    d_a = build_discriminator(cfg_.discriminator);
    d_b = build_discriminator(cfg_.discriminator);
    make_optimizers();
}

void CycleGan::make_optimizers() {
    opt_g_ = make_adam(joined_parameters(*g_ab, *g_ba), cfg_);
    opt_d_ = make_adam(joined_parameters(*d_a, *d_b), cfg_);
}

void CycleGan::set_lr(double lr) {
    set_adam_lr(*opt_g_, lr);
    set_adam_lr(*opt_d_, lr);
}

CycleGanLosses CycleGan::step(const torch::Tensor& a, const torch::Tensor& b) {
    const auto mode = cfg_.adversarial;
    CycleGanLosses out;

    const torch::Tensor fake_b = g_ab->forward(a);
    const torch::Tensor rec_a = g_ba->forward(fake_b);
    const torch::Tensor fake_a = g_ba->forward(b);
    const torch::Tensor rec_b = g_ab->forward(fake_a);

    set_requires_grad(*d_a, false);
    set_requires_grad(*d_b, false);
    const torch::Tensor loss_g_ab = generator_adversarial_loss(d_b->forward(fake_b), mode);
    const torch::Tensor loss_g_ba = generator_adversarial_loss(d_a->forward(fake_a), mode);
    const torch::Tensor loss_cyc = cfg_.lambda_cyc * (l1_distance(rec_a, a) + l1_distance(rec_b, b));
    torch::Tensor total = loss_g_ab + loss_g_ba + loss_cyc;
    if (cfg_.identity_weight > 0.0) {
        const torch::Tensor loss_idt = cfg_.lambda_cyc * cfg_.identity_weight *
                                       (l1_distance(g_ab->forward(b), b) + l1_distance(g_ba->forward(a), a));
        out.idt = checked(loss_idt, "identity");
        total = total + loss_idt;
    }
    out.g_ab = checked(loss_g_ab, "G_ab");
    out.g_ba = checked(loss_g_ba, "G_ba");
    out.cyc = checked(loss_cyc, "cycle");
    out.total_g = checked(total, "generator total");
    opt_g_->zero_grad();
    total.backward();
    opt_g_->step();

    set_requires_grad(*d_a, true);
    set_requires_grad(*d_b, true);
    const torch::Tensor loss_d_a = discriminator_loss(d_a->forward(a), d_a->forward(fake_a.detach()), mode);
    const torch::Tensor loss_d_b = discriminator_loss(d_b->forward(b), d_b->forward(fake_b.detach()), mode);
    out.d_a = checked(loss_d_a, "D_a");
    out.d_b = checked(loss_d_b, "D_b");
    opt_d_->zero_grad();
    (loss_d_a + loss_d_b).backward();
    opt_d_->step();
    return out;
}

void CycleGan::save(const fs::path& path, int epoch, std::int64_t iteration) const {
    OutputArchive ar;
    write_header(ar, ModelKind::CycleGan, cfg_, epoch, iteration);
    write_module(ar, "G_ab", *g_ab);
    write_module(ar, "G_ba", *g_ba);
    write_module(ar, "D_a", *d_a);
    write_module(ar, "D_b", *d_b);
    write_optimizer(ar, "opt_G", *opt_g_);
    write_optimizer(ar, "opt_D", *opt_d_);
    save_archive(ar, path);
}

CycleGan CycleGan::load(const fs::path& path, CheckpointHeader* header) {
    InputArchive ar = open_archive(path);
    const CheckpointHeader h = read_header(ar, path);
    if (h.kind != ModelKind::CycleGan) throw DataError("checkpoint is not a CycleGAN: " + path.string());
    CycleGan model(h.config);
    read_module(ar, "G_ab", *model.g_ab);
    read_module(ar, "G_ba", *model.g_ba);
    read_module(ar, "D_a", *model.d_a);
    read_module(ar, "D_b", *model.d_b);
    read_optimizer(ar, "opt_G", *model.opt_g_);
    read_optimizer(ar, "opt_D", *model.opt_d_);
    restore_rng(ar);
    if (header) *header = h;
    return model;
}

// ----------------------------------------------------------------- pix2pix

Pix2Pix::Pix2Pix(const TrainConfig& cfg) : cfg_(cfg) {
    cfg_.generator.in_channels = cfg_.generator.out_channels = 2;
    cfg_.discriminator.in_channels = 4;
    validate(cfg_);
    seed_torch(cfg_.seed);
    g = build_generator(cfg_.generator);
    d = build_discriminator(cfg_.discriminator);
    make_optimizers();
}

void Pix2Pix::make_optimizers() {
    opt_g_ = make_adam(g->parameters(), cfg_);
    opt_d_ = make_adam(d->parameters(), cfg_);
}

void Pix2Pix::set_lr(double lr) {
    set_adam_lr(*opt_g_, lr);
    set_adam_lr(*opt_d_, lr);
}

Pix2PixLosses Pix2Pix::step(const torch::Tensor& x, const torch::Tensor& y) {
    if (x.sizes() != y.sizes()) throw ShapeError("paired batches differ in shape");
    const auto mode = cfg_.adversarial;
    Pix2PixLosses out;

    const torch::Tensor fake = g->forward(x);
    set_requires_grad(*d, false);
    const torch::Tensor loss_adv = generator_adversarial_loss(d->forward(torch::cat({x, fake}, 1)), mode);
    const torch::Tensor loss_l1 = l1_distance(fake, y);
    const torch::Tensor total = loss_adv + cfg_.lambda_cyc * loss_l1;
    out.g_adv = checked(loss_adv, "G adversarial");
    out.l1 = checked(loss_l1, "L1");
    out.total_g = checked(total, "generator total");
    opt_g_->zero_grad();
    total.backward();
    opt_g_->step();

    set_requires_grad(*d, true);
    const torch::Tensor loss_d = discriminator_loss(d->forward(torch::cat({x, y}, 1)),
                                                    d->forward(torch::cat({x, fake.detach()}, 1)), mode);
    out.d = checked(loss_d, "D");
    opt_d_->zero_grad();
    loss_d.backward();
    opt_d_->step();
    return out;
}

void Pix2Pix::save(const fs::path& path, int epoch, std::int64_t iteration) const {
    OutputArchive ar;
    write_header(ar, ModelKind::Pix2Pix, cfg_, epoch, iteration);
    write_module(ar, "G", *g);
    write_module(ar, "D", *d);
    write_optimizer(ar, "opt_G", *opt_g_);
    write_optimizer(ar, "opt_D", *opt_d_);
    save_archive(ar, path);
}

Pix2Pix Pix2Pix::load(const fs::path& path, CheckpointHeader* header) {
    InputArchive ar = open_archive(path);
    const CheckpointHeader h = read_header(ar, path);
    if (h.kind != ModelKind::Pix2Pix) throw DataError("checkpoint is not a pix2pix model: " + path.string());
    Pix2Pix model(h.config);
    read_module(ar, "G", *model.g);
    read_module(ar, "D", *model.d);
    read_optimizer(ar, "opt_G", *model.opt_g_);
    read_optimizer(ar, "opt_D", *model.opt_d_);
    restore_rng(ar);
    if (header) *header = h;
    return model;
}

// ------------------------------------------------------------ training loop

std::vector<std::size_t> batch_indices(std::uint64_t seed, int epoch, int step, const std::string& domain,
                                       std::size_t domain_size, int batch_size) {
    if (domain_size == 0) throw DataError("empty training domain");
    std::vector<std::size_t> perm(domain_size);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 engine(derive_seed(seed, {"order", std::to_string(epoch), domain}));
    std::shuffle(perm.begin(), perm.end(), engine);
    std::vector<std::size_t> out(static_cast<std::size_t>(batch_size));
    for (int k = 0; k < batch_size; ++k)
        out[static_cast<std::size_t>(k)] =
            perm[(static_cast<std::size_t>(step) * static_cast<std::size_t>(batch_size) + static_cast<std::size_t>(k)) %
                 domain_size];
    return out;
}

namespace {

Rng augment_stream(std::uint64_t seed, int epoch, int step, const std::string& domain, int slot) {
    return Rng{derive_seed(seed, {"augment", std::to_string(epoch), std::to_string(step), domain,
                                  std::to_string(slot)})};
}

std::vector<ImagePatch> resized_domain(const std::vector<ImagePatch>& patches, int side) {
    std::vector<ImagePatch> out(patches.size());
    parallel_for(patches.size(), [&](std::size_t i) {
        const auto& p = patches[i];
        validate_patch(p);
        out[i] = p.size_px() == side ? p : ImagePatch{resize(p.nucleus, side, side), resize(p.tubule, side, side), p.meta};
    });
    return out;
}

torch::Tensor make_batch(const std::vector<ImagePatch>& patches, const std::vector<std::size_t>& idx,
                         const TrainConfig& cfg, int epoch, int step, const std::string& domain) {
    std::vector<ImagePatch> items;
    items.reserve(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k)
        items.push_back(augment(patches[idx[k]], cfg.load_side, cfg.crop,
                                augment_stream(cfg.seed, epoch, step, domain, static_cast<int>(k))));
    return to_tensor(items);
}

Json resume_signature(TrainConfig cfg) {
    Json j = to_json(cfg);
    j.erase("max_epochs");
    j.erase("threads");
    j.erase("save_initial");
    return j;
}

int end_epoch(const TrainConfig& cfg) {
    return cfg.max_epochs > 0 ? std::min(cfg.max_epochs, cfg.total_epochs()) : cfg.total_epochs();
}

// Opens the run log, keeping rows up to `keep_iteration` when resuming. A
// fresh output directory inherits the log of the run being resumed.
std::unique_ptr<CsvWriter> open_log(const fs::path& out_dir, const CsvRow& header, std::int64_t keep_iteration,
                                    const TrainRunOptions& options) {
    const fs::path path = out_dir / kTrainLogFile;
    fs::path previous = path;
    if (options.resume_from && !fs::exists(previous))
        previous = options.resume_from->parent_path().parent_path() / kTrainLogFile;
    std::vector<CsvRow> kept;
    if (keep_iteration > 0 && fs::exists(previous)) {
        const auto rows = read_csv(previous);
        if (rows.empty() || rows.front() != header) throw DataError("existing training log has a different header");
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (std::stoll(rows[i].at(0)) <= keep_iteration) kept.push_back(rows[i]);
    }
    auto log = std::make_unique<CsvWriter>(path, header);
    for (const auto& row : kept) log->row(row);
    return log;
}

void apply_threads(const TrainConfig& cfg) {
    if (cfg.threads > 0) torch::set_num_threads(cfg.threads);
}

template <class Model>
Model start_model(const TrainConfig& cfg, const TrainRunOptions& options, CheckpointHeader& header) {
    if (!options.resume_from) {
        header = CheckpointHeader{};
        header.config = cfg;
        return Model(cfg);
    }
    Model model = Model::load(*options.resume_from, &header);
    if (resume_signature(header.config) != resume_signature(cfg))
        throw ConfigError("training config differs from the checkpoint being resumed");
    return model;
}

}  // namespace

CheckpointSeries train_cyclegan(const std::vector<ImagePatch>& domain_a, const std::vector<ImagePatch>& domain_b,
                                const TrainConfig& cfg, const TrainRunOptions& options) {
    validate(cfg);
    if (domain_a.empty() || domain_b.empty()) throw DataError("both training domains must be non-empty");
    apply_threads(cfg);
    torch::globalContext().setDeterministicAlgorithms(true, false);

    CheckpointHeader start;
    CycleGan model = start_model<CycleGan>(cfg, options, start);
    const auto a = resized_domain(domain_a, cfg.load_side);
    const auto b = resized_domain(domain_b, cfg.load_side);
    const int steps = static_cast<int>((std::max(a.size(), b.size()) + cfg.batch_size - 1) / cfg.batch_size);

    fs::create_directories(options.out_dir / "checkpoints");
    CheckpointSeries series{options.out_dir / "checkpoints", {}};
    if (!options.resume_from && cfg.save_initial) {
        model.save(checkpoint_path(options.out_dir, 0), 0, 0);
        series.checkpoints.push_back({0, 0, checkpoint_path(options.out_dir, 0)});
    }
    CsvRow header{"iteration", "epoch", "loss_G_ab", "loss_G_ba", "loss_D_a", "loss_D_b", "loss_cyc", "lr"};
    if (cfg.identity_weight > 0.0) header.push_back("loss_idt");
    auto log = open_log(options.out_dir, header, start.iteration, options);

    std::int64_t iteration = start.iteration;
    for (int epoch = start.epoch; epoch < end_epoch(cfg); ++epoch) {
        const double lr = lr_at_epoch(epoch, cfg);
        model.set_lr(lr);
        double sum_g = 0.0;
        double sum_d = 0.0;
        for (int s = 0; s < steps; ++s) {
            const auto ia = batch_indices(cfg.seed, epoch, s, "a", a.size(), cfg.batch_size);
            const auto ib = batch_indices(cfg.seed, epoch, s, "b", b.size(), cfg.batch_size);
            const auto ta = make_batch(a, ia, cfg, epoch, s, "a");
            const auto tb = make_batch(b, ib, cfg, epoch, s, "b");
            CycleGanLosses l;
            try {
                l = model.step(ta, tb);
            } catch (const DivergenceError& e) {
                log->close();
                throw DivergenceError(std::string(e.what()) + " at iteration " + std::to_string(iteration + 1));
            }
            ++iteration;
            sum_g += l.total_g;
            sum_d += l.d_a + l.d_b;
            CsvRow row{std::to_string(iteration), std::to_string(epoch + 1), format_real(l.g_ab), format_real(l.g_ba),
                       format_real(l.d_a), format_real(l.d_b), format_real(l.cyc), format_real(lr)};
            if (cfg.identity_weight > 0.0) row.push_back(format_real(l.idt));
            log->row(row);
        }
        const fs::path ckpt = checkpoint_path(options.out_dir, epoch + 1);
        model.save(ckpt, epoch + 1, iteration);
        series.checkpoints.push_back({epoch + 1, iteration, ckpt});
        log::info("cyclegan epoch " + std::to_string(epoch + 1) + "/" + std::to_string(cfg.total_epochs()) +
                  ": mean G " + format_real(sum_g / steps) + ", mean D " + format_real(sum_d / steps) +
                  ", lr " + format_real(lr));
    }
    log->close();
    return series;
}

CheckpointSeries train_cyclegan(const DatasetManifest& source, const DatasetManifest& target,
                                const TrainConfig& cfg, const TrainRunOptions& options) {
    return train_cyclegan(load_patches(source), load_patches(target), cfg, options);
}

CheckpointSeries train_pix2pix(const std::vector<std::pair<ImagePatch, ImagePatch>>& pairs, const TrainConfig& cfg,
                               const TrainRunOptions& options) {
    validate(cfg);
    if (pairs.empty()) throw DataError("pix2pix needs at least one training pair");
    apply_threads(cfg);
    torch::globalContext().setDeterministicAlgorithms(true, false);

    CheckpointHeader start;
    Pix2Pix model = start_model<Pix2Pix>(cfg, options, start);
    std::vector<ImagePatch> xs;
    std::vector<ImagePatch> ys;
    for (const auto& [x, y] : pairs) {
        xs.push_back(x);
        ys.push_back(y);
    }
    xs = resized_domain(xs, cfg.load_side);
    ys = resized_domain(ys, cfg.load_side);
    const int steps = static_cast<int>((xs.size() + cfg.batch_size - 1) / cfg.batch_size);

    fs::create_directories(options.out_dir / "checkpoints");
    CheckpointSeries series{options.out_dir / "checkpoints", {}};
    if (!options.resume_from && cfg.save_initial) {
        model.save(checkpoint_path(options.out_dir, 0), 0, 0);
        series.checkpoints.push_back({0, 0, checkpoint_path(options.out_dir, 0)});
    }
    auto log = open_log(options.out_dir, {"iteration", "epoch", "loss_G_adv", "loss_l1", "loss_G", "loss_D", "lr"},
                        start.iteration, options);

    std::int64_t iteration = start.iteration;
    for (int epoch = start.epoch; epoch < end_epoch(cfg); ++epoch) {
        const double lr = lr_at_epoch(epoch, cfg);
        model.set_lr(lr);
        double sum_l1 = 0.0;
        for (int s = 0; s < steps; ++s) {
            const auto idx = batch_indices(cfg.seed, epoch, s, "pair", xs.size(), cfg.batch_size);
            // Same stream for both sides, so x and y share the crop window.
            const auto tx = make_batch(xs, idx, cfg, epoch, s, "pair");
            const auto ty = make_batch(ys, idx, cfg, epoch, s, "pair");
            Pix2PixLosses l;
            try {
                l = model.step(tx, ty);
            } catch (const DivergenceError& e) {
                log->close();
                throw DivergenceError(std::string(e.what()) + " at iteration " + std::to_string(iteration + 1));
            }
            ++iteration;
            sum_l1 += l.l1;
            log->row({std::to_string(iteration), std::to_string(epoch + 1), format_real(l.g_adv), format_real(l.l1),
                      format_real(l.total_g), format_real(l.d), format_real(lr)});
        }
        const fs::path ckpt = checkpoint_path(options.out_dir, epoch + 1);
        model.save(ckpt, epoch + 1, iteration);
        series.checkpoints.push_back({epoch + 1, iteration, ckpt});
        log::info("pix2pix epoch " + std::to_string(epoch + 1) + "/" + std::to_string(cfg.total_epochs()) +
                  ": mean L1 " + format_real(sum_l1 / steps) + ", lr " + format_real(lr));
    }
    log->close();
    return series;
}

CheckpointSeries train_pix2pix(const DatasetManifest& source, const DatasetManifest& target, const TrainConfig& cfg,
                               const TrainRunOptions& options) {
    const auto xs = load_patches(source);
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < target.entries.size(); ++i) by_id[target.entries[i].meta.patch_id()] = i;
    std::vector<std::pair<ImagePatch, ImagePatch>> pairs;
    pairs.reserve(xs.size());
    for (const auto& x : xs) {
        const auto it = by_id.find(x.meta.patch_id());
        if (it == by_id.end()) throw DataError("no target patch for " + x.meta.patch_id());
        pairs.emplace_back(x, load_patch(target, target.entries[it->second]));
    }
    return train_pix2pix(pairs, cfg, options);
}

}  // namespace hcs::neural
