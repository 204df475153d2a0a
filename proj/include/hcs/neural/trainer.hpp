#pragma once
// CycleGAN (unpaired) and pix2pix (paired) training with per-epoch
// checkpoints, a per-iteration CSV loss log and exact resume.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "hcs/manifest.hpp"
#include "hcs/neural/networks.hpp"
#include "hcs/neural/train_config.hpp"
#include "hcs/patch.hpp"

namespace hcs::neural {

inline constexpr const char* kCheckpointFormat = "hcs-ckpt-v1";
inline constexpr const char* kTrainLogFile = "train_log.csv";

enum class ModelKind { CycleGan, Pix2Pix };
std::string to_string(ModelKind kind);

struct CheckpointInfo {
    int epoch = 0;
    std::int64_t iteration = 0;
    std::filesystem::path path;
};

struct CheckpointSeries {
    std::filesystem::path dir;
    std::vector<CheckpointInfo> checkpoints;  // ascending epoch
};

/// `checkpoints/epoch_XXX.pt` under a run directory.
std::filesystem::path checkpoint_path(const std::filesystem::path& run_dir, int epoch);
/// Lists epoch_*.pt files of `dir` (a run directory or its checkpoints/).
CheckpointSeries scan_checkpoints(const std::filesystem::path& dir);

struct CheckpointHeader {
    ModelKind kind = ModelKind::CycleGan;
    TrainConfig config;
    int epoch = 0;
    std::int64_t iteration = 0;
};
CheckpointHeader read_checkpoint_header(const std::filesystem::path& path);

struct CycleGanLosses {
    double g_ab = 0.0;  // adversarial term of G_ab against D_b
    double g_ba = 0.0;  // adversarial term of G_ba against D_a
    double d_a = 0.0;
    double d_b = 0.0;
    double cyc = 0.0;  // lambda * cycle_loss
    double idt = 0.0;  // lambda * identity_weight * identity term (0 when disabled)
    double total_g = 0.0;
};

class CycleGan {
public:
    /// Networks are initialized from a torch generator seeded by cfg.seed.
    explicit CycleGan(const TrainConfig& cfg);

    /// One generator update followed by one discriminator update.
    CycleGanLosses step(const torch::Tensor& batch_a, const torch::Tensor& batch_b);
    void set_lr(double lr);

    void save(const std::filesystem::path& path, int epoch, std::int64_t iteration) const;
    /// Restores networks, optimizer state and torch rng state.
    static CycleGan load(const std::filesystem::path& path, CheckpointHeader* header = nullptr);

    [[nodiscard]] const TrainConfig& config() const noexcept { return cfg_; }

    Generator g_ab{nullptr};
    Generator g_ba{nullptr};
    Discriminator d_a{nullptr};
    Discriminator d_b{nullptr};

private:
    TrainConfig cfg_;
    std::unique_ptr<torch::optim::Adam> opt_g_;
    std::unique_ptr<torch::optim::Adam> opt_d_;
    void make_optimizers();
};

struct Pix2PixLosses {
    double g_adv = 0.0;
    double l1 = 0.0;  // unweighted mean |G(x) - y|
    double total_g = 0.0;  // g_adv + lambda * l1
    double d = 0.0;
};

class Pix2Pix {
public:
    explicit Pix2Pix(const TrainConfig& cfg);

    Pix2PixLosses step(const torch::Tensor& batch_x, const torch::Tensor& batch_y);
    void set_lr(double lr);

    void save(const std::filesystem::path& path, int epoch, std::int64_t iteration) const;
    static Pix2Pix load(const std::filesystem::path& path, CheckpointHeader* header = nullptr);

    [[nodiscard]] const TrainConfig& config() const noexcept { return cfg_; }

    Generator g{nullptr};
    Discriminator d{nullptr};  // conditional: sees concat(x, y)

private:
    TrainConfig cfg_;
    std::unique_ptr<torch::optim::Adam> opt_g_;
    std::unique_ptr<torch::optim::Adam> opt_d_;
    void make_optimizers();
};

struct TrainRunOptions {
    std::filesystem::path out_dir;
    /// Continue from this checkpoint; the run's config must match the stored
    /// one apart from max_epochs and threads.
    std::optional<std::filesystem::path> resume_from;
};

/// Epoch e visits ceil(max(nA, nB) / batch) steps; each domain follows its own
/// permutation for the epoch and wraps around when exhausted. Writes
/// `train_log.csv` and one checkpoint per epoch under out_dir. Throws
/// DivergenceError on a non-finite loss.
CheckpointSeries train_cyclegan(const std::vector<ImagePatch>& domain_a, const std::vector<ImagePatch>& domain_b,
                                const TrainConfig& cfg, const TrainRunOptions& options);
CheckpointSeries train_cyclegan(const DatasetManifest& source, const DatasetManifest& target,
                                const TrainConfig& cfg, const TrainRunOptions& options);

/// Pairs are (degraded input, clean target); both are cropped at the same offset.
CheckpointSeries train_pix2pix(const std::vector<std::pair<ImagePatch, ImagePatch>>& pairs,
                               const TrainConfig& cfg, const TrainRunOptions& options);
/// Pairs source and target entries by patch id; throws DataError on ids
/// missing from the target.
CheckpointSeries train_pix2pix(const DatasetManifest& source, const DatasetManifest& target,
                               const TrainConfig& cfg, const TrainRunOptions& options);

/// Patch indices of domain `domain` ("a" or "b") for a given epoch and step.
std::vector<std::size_t> batch_indices(std::uint64_t seed, int epoch, int step, const std::string& domain,
                                       std::size_t domain_size, int batch_size);

}  // namespace hcs::neural
