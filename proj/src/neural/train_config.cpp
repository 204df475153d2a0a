#include "hcs/neural/train_config.hpp"

#include <string>

namespace hcs::neural {

void validate(const TrainConfig& cfg) {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ParameterError("train config: " + msg);
    };
    require(cfg.lambda_cyc >= 0.0, "lambda_cyc must be >= 0");
    require(cfg.identity_weight >= 0.0, "identity_weight must be >= 0");
    require(cfg.lr0 > 0.0, "lr0 must be > 0");
    require(cfg.epochs_const >= 0 && cfg.epochs_decay >= 0 && cfg.total_epochs() > 0,
            "epochs_const and epochs_decay must be >= 0 with a positive sum");
    require(cfg.batch_size >= 1, "batch_size must be >= 1");
    require(cfg.crop >= 8 && cfg.crop % kGeneratorStride == 0, "crop must be a multiple of 4 and >= 8");
    require(cfg.load_side >= cfg.crop, "crop must not exceed load_side");
    require(cfg.adam_betas.first >= 0.0 && cfg.adam_betas.first < 1.0 && cfg.adam_betas.second >= 0.0 &&
                cfg.adam_betas.second < 1.0,
            "adam betas must lie in [0, 1)");
    require(cfg.max_epochs >= 0, "max_epochs must be >= 0");
    require(cfg.threads >= 0, "threads must be >= 0");
    validate(cfg.generator);
    validate(cfg.discriminator);
}

double lr_at_epoch(int epoch, const TrainConfig& cfg) {
    if (epoch < 0 || epoch > cfg.total_epochs())
        throw ParameterError("epoch " + std::to_string(epoch) + " outside the schedule [0, " +
                             std::to_string(cfg.total_epochs()) + "]");
    if (epoch < cfg.epochs_const) return cfg.lr0;
    if (cfg.epochs_decay == 0) return 0.0;
    return cfg.lr0 * (1.0 - static_cast<double>(epoch - cfg.epochs_const) / cfg.epochs_decay);
}

TrainConfig train_config_from_json(const Json& node, const std::string& path) {
    TrainConfig cfg;
    ConfigReader r(node, path);
    r.get("lambda_cyc", cfg.lambda_cyc);
    r.get("identity_weight", cfg.identity_weight);
    r.get("lr0", cfg.lr0);
    r.get("epochs_const", cfg.epochs_const);
    r.get("epochs_decay", cfg.epochs_decay);
    r.get("batch_size", cfg.batch_size);
    r.get("crop", cfg.crop);
    r.get("load_side", cfg.load_side);
    r.get("seed", cfg.seed);
    std::vector<double> betas{cfg.adam_betas.first, cfg.adam_betas.second};
    r.get("adam_betas", betas);
    if (betas.size() != 2) r.fail("adam_betas", "expected two numbers");
    cfg.adam_betas = {betas[0], betas[1]};
    std::string loss = to_string(cfg.adversarial);
    r.get("adversarial_loss", loss);
    try {
        cfg.adversarial = parse_adversarial_loss(loss);
    } catch (const ParameterError& e) {
        r.fail("adversarial_loss", e.what());
    }
    r.get("save_initial", cfg.save_initial);
    r.get("max_epochs", cfg.max_epochs);
    r.get("threads", cfg.threads);

    ConfigReader g = r.child("generator");
    g.get("base_width", cfg.generator.base_width);
    g.get("n_res_blocks", cfg.generator.n_res_blocks);
    g.finish();
    ConfigReader d = r.child("discriminator");
    d.get("base_width", cfg.discriminator.base_width);
    d.get("n_layers", cfg.discriminator.n_layers);
    d.finish();
    r.finish();

    require_non_negative(r, "lambda_cyc", cfg.lambda_cyc);
    require_non_negative(r, "identity_weight", cfg.identity_weight);
    require_positive(r, "lr0", cfg.lr0);
    require_positive(r, "batch_size", cfg.batch_size);
    require_non_negative(r, "epochs_const", cfg.epochs_const);
    require_non_negative(r, "epochs_decay", cfg.epochs_decay);
    if (cfg.total_epochs() < 1) r.fail("epochs_decay", "epochs_const + epochs_decay must be >= 1");
    if (cfg.crop < 8 || cfg.crop % kGeneratorStride != 0) r.fail("crop", "must be a multiple of 4 and >= 8");
    if (cfg.load_side < cfg.crop) r.fail("load_side", "must be >= crop");
    require_range(r, "adam_betas", cfg.adam_betas.first, 0.0, 0.999999);
    require_range(r, "adam_betas", cfg.adam_betas.second, 0.0, 0.999999);
    require_non_negative(r, "max_epochs", cfg.max_epochs);
    require_non_negative(r, "threads", cfg.threads);
    require_positive(g, "base_width", cfg.generator.base_width);
    require_positive(g, "n_res_blocks", cfg.generator.n_res_blocks);
    require_positive(d, "base_width", cfg.discriminator.base_width);
    if (cfg.discriminator.n_layers < 2) d.fail("n_layers", "must be >= 2");
    return cfg;
}

Json to_json(const TrainConfig& cfg) {
    return Json{{"lambda_cyc", cfg.lambda_cyc},
                {"identity_weight", cfg.identity_weight},
                {"lr0", cfg.lr0},
                {"epochs_const", cfg.epochs_const},
                {"epochs_decay", cfg.epochs_decay},
                {"batch_size", cfg.batch_size},
                {"crop", cfg.crop},
                {"load_side", cfg.load_side},
                {"seed", cfg.seed},
                {"adam_betas", {cfg.adam_betas.first, cfg.adam_betas.second}},
                {"adversarial_loss", to_string(cfg.adversarial)},
                {"save_initial", cfg.save_initial},
                {"max_epochs", cfg.max_epochs},
                {"threads", cfg.threads},
                {"generator", {{"base_width", cfg.generator.base_width}, {"n_res_blocks", cfg.generator.n_res_blocks}}},
                {"discriminator",
                 {{"base_width", cfg.discriminator.base_width}, {"n_layers", cfg.discriminator.n_layers}}}};
}

}  // namespace hcs::neural
