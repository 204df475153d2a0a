#pragma once

#include <cstdint>
#include <utility>

#include "hcs/config_reader.hpp"
#include "hcs/neural/losses.hpp"
#include "hcs/neural/networks.hpp"

namespace hcs::neural {

struct TrainConfig {
    double lambda_cyc = 10.0;  // weight of the cycle (CycleGAN) or paired L1 (pix2pix) term
    /// CycleGAN only: weight of |G_ab(b) - b| + |G_ba(a) - a| relative to
    /// lambda_cyc. 0 disables the identity-mapping term.
    double identity_weight = 0.0;
    double lr0 = 0.0002;
    int epochs_const = 20;
    int epochs_decay = 20;
    int batch_size = 8;
    int crop = 64;
    int load_side = 128;  // patches are resized to this side before cropping
    std::uint64_t seed = 0;
    std::pair<double, double> adam_betas{0.5, 0.999};
    AdversarialLoss adversarial = AdversarialLoss::Log;
    GeneratorSpec generator;
    DiscriminatorSpec discriminator;
    /// Also write epoch_000 holding the untrained networks.
    bool save_initial = false;
    /// Stop after this many epochs (0: run the full schedule); the lr schedule
    /// is unaffected.
    int max_epochs = 0;
    /// Intra-op threads for torch (0 keeps torch's default).
    int threads = 0;

    [[nodiscard]] int total_epochs() const noexcept { return epochs_const + epochs_decay; }
};

/// Throws ParameterError naming the offending field.
void validate(const TrainConfig& cfg);

/// lr0 while epoch < epochs_const, then linear to 0 at epochs_const + epochs_decay.
/// Throws ParameterError for epochs outside [0, epochs_const + epochs_decay].
double lr_at_epoch(int epoch, const TrainConfig& cfg);

/// Reads a `train` config section strictly; absent fields keep their defaults.
TrainConfig train_config_from_json(const Json& node, const std::string& path = "train");
Json to_json(const TrainConfig& cfg);

}  // namespace hcs::neural
