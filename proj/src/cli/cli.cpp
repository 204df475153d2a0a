#include "hcs/cli.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "context.hpp"
#include "hcs/errors.hpp"
#include "hcs/log.hpp"
#include "hcs/rng.hpp"

#ifndef HCS_VERSION
#define HCS_VERSION "unknown"
#endif

namespace hcs::cli {
namespace {

constexpr const char* kIncompleteMarker = "INCOMPLETE";
constexpr const char* kProvenanceFile = "provenance.json";
constexpr const char* kConfigCopy = "config.json";

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

struct Subcommand {
    const char* name;
    const char* help;
    Command run;
};

const std::vector<Subcommand>& subcommands() {
    static const std::vector<Subcommand> table{
        {"synth-fixtures", "Write a synthetic single-cell patch dataset", cmd_synth_fixtures},
        {"extract-patches", "Segment nuclei in raw images and crop single-cell patches", cmd_extract_patches},
        {"split", "Assign train/val/test splits by source image", cmd_split},
        {"simulate", "Build degraded datasets from high-quality patches", cmd_simulate},
        {"train-cyclegan", "Train an unpaired CycleGAN", cmd_train_cyclegan},
        {"train-pix2pix", "Train a paired pix2pix model", cmd_train_pix2pix},
        {"restore", "Restore a dataset with a trained generator or deconvolution", cmd_restore},
        {"evaluate", "Score restored patches against ground truth", cmd_evaluate},
        {"track", "Score every checkpoint of a training run", cmd_track},
        {"segment", "Segment microtubules", cmd_segment},
        {"quantify", "Measure perinuclear microtubule density per cell", cmd_quantify},
        {"dose-response", "Aggregate densities per compound and concentration", cmd_dose_response},
    };
    return table;
}

// Per-subcommand flags that map onto config fields.
struct FlagBinding {
    std::string flag;
    std::string key;
    std::string help;
};

const std::map<std::string, std::vector<FlagBinding>>& flag_bindings() {
    static const std::map<std::string, std::vector<FlagBinding>> table{
        {"extract-patches",
         {{"--input-dir", "ingest.input_dir", "Directory of raw channel images"},
          {"--nucleus-suffix", "ingest.nucleus_suffix", "File suffix of the nucleus channel"},
          {"--tubule-suffix", "ingest.tubule_suffix", "File suffix of the microtubule channel"},
          {"--patch-size", "ingest.patch_size", "Patch side in pixels"},
          {"--annotations", "ingest.annotations", "Per-image annotation CSV"}}},
        {"split", {{"--input", "split.input", "Dataset to split"}}},
        {"simulate", {{"--input", "degrade.input", "High-quality dataset"}}},
        {"restore",
         {{"--method", "restore.method", "cyclegan, pix2pix, rl or identity"},
          {"--iterations", "restore.rl_iterations", "Richardson-Lucy iterations"},
          {"--input", "restore.input", "Dataset to restore"},
          {"--checkpoint", "restore.checkpoint", "Checkpoint file or training run directory"}}},
        {"evaluate",
         {{"--restored", "evaluate.restored", "Restored dataset"},
          {"--ground-truth", "evaluate.ground_truth", "Ground-truth dataset"}}},
        {"segment", {{"--input", "segment.input", "Dataset to segment"}}},
        {"quantify", {{"--input", "quantify.input", "Dataset to measure"}}},
        {"dose-response", {{"--densities", "dose_response.densities", "Density CSV"}}},
    };
    return table;
}

// Flag values arrive as text; numbers and booleans go in as JSON literals.
std::string binding_override(const std::string& key, const std::string& value) {
    Json parsed;
    try {
        parsed = Json::parse(value);
    } catch (const Json::parse_error&) {
        return key + "=" + Json(value).dump();
    }
    if (parsed.is_number() || parsed.is_boolean()) return key + "=" + value;
    return key + "=" + Json(value).dump();
}

std::string default_output_name(const std::string& subcommand, const RunConfig& cfg) {
    if (subcommand == "restore") return "restore-" + cfg.restore.method;
    return subcommand;
}

void prepare_output(const fs::path& out_dir) {
    if (fs::exists(out_dir)) {
        if (fs::exists(out_dir / kIncompleteMarker)) {
            log::warn("removing incomplete output " + out_dir.string());
            fs::remove_all(out_dir);
        } else if (!fs::is_directory(out_dir) || !fs::is_empty(out_dir)) {
            throw ConfigError("output " + out_dir.string() +
                              " already exists; outputs are write-once, choose another run_id or --name");
        }
    }
    fs::create_directories(out_dir);
    write_text(out_dir / kIncompleteMarker, "");
}

Json provenance(const RunContext& ctx) {
    Json j;
    j["tool"] = "hcs";
    j["version"] = HCS_VERSION;
    j["subcommand"] = ctx.subcommand;
    j["run_id"] = ctx.config.run_id;
    j["seed"] = ctx.config.seed;
    j["config_sha256"] = sha256_hex(ctx.effective.dump());
    j["overrides"] = ctx.overrides;
    Json inputs = Json::array();
    for (const auto& p : ctx.inputs) {
        Json item;
        item["path"] = p.lexically_normal().string();
        item["sha256"] = fs::is_regular_file(p) ? sha256_file(p) : "";
        inputs.push_back(item);
    }
    j["inputs"] = inputs;
    // Every artifact written, with its digest.
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(ctx.out_dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    Json outputs = Json::array();
    for (const auto& f : files) {
        const auto rel = f.lexically_relative(ctx.out_dir).generic_string();
        if (rel == kIncompleteMarker || rel == kProvenanceFile) continue;
        outputs.push_back(Json{{"path", rel}, {"sha256", sha256_file(f)}});
    }
    j["outputs"] = outputs;
    return j;
}

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string run_id;
    std::string output_root;
    std::string name;
    std::string out;
    std::vector<std::string> overrides;
    std::string log_level = "info";
};

int execute(const std::string& subcommand, const Command command, const GlobalOptions& opts,
            std::vector<std::string> overrides) {
    RunContext ctx;
    ctx.subcommand = subcommand;
    Json doc = Json::object();
    if (!opts.config.empty()) {
        const fs::path config_path = fs::absolute(opts.config);
        ctx.config_text = read_text(config_path);
        try {
            doc = Json::parse(ctx.config_text);
        } catch (const Json::parse_error& e) {
            throw ConfigError(config_path.string() + ": " + e.what());
        }
        if (!doc.is_object()) throw ConfigError(config_path.string() + ": top level must be an object");
        ctx.config_dir = config_path.parent_path();
    } else {
        ctx.config_dir = fs::current_path();
    }
    if (opts.seed) overrides.push_back("seed=" + std::to_string(*opts.seed));
    if (!opts.run_id.empty()) overrides.push_back("run_id=" + Json(opts.run_id).dump());
    if (const char* env = std::getenv(kOutputRootEnv); env && *env)
        overrides.push_back("output_root=" + Json(std::string(env)).dump());
    if (!opts.output_root.empty()) overrides.push_back("output_root=" + Json(opts.output_root).dump());
    for (const auto& o : overrides) apply_override(doc, o);
    ctx.overrides = overrides;
    ctx.config = parse_run_config(doc);
    ctx.effective = doc;

    fs::path root = ctx.config.output_root;
    if (root.is_relative()) root = ctx.config_dir / root;
    ctx.run_dir = (root / ctx.config.run_id).lexically_normal();
    if (!opts.out.empty())
        ctx.out_dir = fs::absolute(opts.out).lexically_normal();
    else
        ctx.out_dir = ctx.run_dir / (opts.name.empty() ? default_output_name(subcommand, ctx.config) : opts.name);

    prepare_output(ctx.out_dir);
    write_text(ctx.out_dir / kConfigCopy, opts.config.empty() ? doc.dump(2) + "\n" : ctx.config_text);
    log::info(subcommand + " -> " + ctx.out_dir.string());
    command(ctx);
    write_text(ctx.out_dir / kProvenanceFile, provenance(ctx).dump(2) + "\n");
    fs::remove(ctx.out_dir / kIncompleteMarker);
    return kOk;
}

}  // namespace

fs::path RunContext::resolve(const std::string& value, const std::string& field) const {
    if (value.empty()) throw ConfigError(field + ": required for " + subcommand);
    const std::string prefix = "@run/";
    if (value.rfind(prefix, 0) == 0) return (run_dir / value.substr(prefix.size())).lexically_normal();
    const fs::path p(value);
    return (p.is_absolute() ? p : config_dir / p).lexically_normal();
}

std::uint64_t RunContext::seed_for(const char* stream) const { return derive_seed(config.seed, {stream}); }

DatasetManifest RunContext::open_manifest(const std::string& value, const std::string& field) {
    const fs::path p = resolve(value, field);
    DatasetManifest m = read_manifest(p);
    inputs.push_back(m.root / kManifestFile);
    return m;
}

DatasetManifest select_split(const DatasetManifest& manifest, const std::string& split) {
    if (split == "all") return manifest;
    const bool tagged = std::any_of(manifest.entries.begin(), manifest.entries.end(),
                                    [](const ManifestEntry& e) { return e.split != SplitTag::None; });
    if (!tagged) {
        log::warn("dataset " + manifest.root.string() + " has no split tags; using every entry");
        return manifest;
    }
    DatasetManifest out = manifest.filter(parse_split_tag(split));
    if (out.entries.empty()) throw DataError("no '" + split + "' entries in " + manifest.root.string());
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    std::ostringstream ss;
    for (unsigned int i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return ss.str();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"High-content screening image restoration and quantification"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", HCS_VERSION);
    GlobalOptions opts;
    app.add_option("-c,--config", opts.config, "JSON config document");
    app.add_option("--seed", opts.seed, "Override the global seed");
    app.add_option("--run-id", opts.run_id, "Override run_id");
    app.add_option("--output-root", opts.output_root, "Override output_root");
    app.add_option("--name", opts.name, "Output directory name under the run (default: the subcommand)");
    app.add_option("--out", opts.out, "Explicit output directory");
    app.add_option("--set", opts.overrides, "Config override key.path=value (repeatable)");
    app.add_option("--log-level", opts.log_level, "debug, info, warn or error")
        ->check(CLI::IsMember({"debug", "info", "warn", "error"}));

    std::map<std::string, std::map<std::string, std::string>> flag_values;
    for (const auto& sc : subcommands()) {
        CLI::App* sub = app.add_subcommand(sc.name, sc.help);
        const auto it = flag_bindings().find(sc.name);
        if (it == flag_bindings().end()) continue;
        for (const auto& b : it->second) sub->add_option(b.flag, flag_values[sc.name][b.key], b.help);
    }

    std::vector<std::string> argv(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    static const std::map<std::string, log::Level> levels{
        {"debug", log::Level::Debug}, {"info", log::Level::Info}, {"warn", log::Level::Warn},
        {"error", log::Level::Error}};
    log::set_level(levels.at(opts.log_level));

    const CLI::App* chosen = app.get_subcommands().front();
    const auto& sc = *std::find_if(subcommands().begin(), subcommands().end(),
                                   [&](const Subcommand& s) { return chosen->get_name() == s.name; });
    std::vector<std::string> overrides = opts.overrides;
    if (const auto it = flag_bindings().find(sc.name); it != flag_bindings().end())
        for (const auto& b : it->second)
            if (chosen->count(b.flag) > 0) overrides.push_back(binding_override(b.key, flag_values[sc.name][b.key]));

    try {
        return execute(sc.name, sc.run, opts, overrides);
    } catch (const ConfigError& e) {
        log::error(std::string("config error: ") + e.what());
        return kConfigError;
    } catch (const ParameterError& e) {
        log::error(std::string("config error: ") + e.what());
        return kConfigError;
    } catch (const DataError& e) {
        log::error(std::string("data error: ") + e.what());
        return kDataError;
    } catch (const ShapeError& e) {
        log::error(std::string("data error: ") + e.what());
        return kDataError;
    } catch (const DegenerateInputError& e) {
        log::error(std::string("data error: ") + e.what());
        return kDataError;
    } catch (const DivergenceError& e) {
        log::error(std::string("training diverged: ") + e.what());
        return kRuntimeError;
    } catch (const std::exception& e) {
        log::error(std::string("error: ") + e.what());
        return kRuntimeError;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 0; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace hcs::cli
