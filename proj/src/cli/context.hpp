#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hcs/manifest.hpp"
#include "run_config.hpp"

namespace hcs::cli {

namespace fs = std::filesystem;

/// Everything a subcommand needs: the validated config, path resolution and
/// the output directory it owns.
struct RunContext {
    RunConfig config;
    Json effective;             // config document after overrides
    std::string config_text;    // verbatim source document ("" without --config)
    fs::path config_dir;        // base for relative paths
    fs::path run_dir;           // <output_root>/<run_id>
    fs::path out_dir;           // this subcommand's output directory
    std::string subcommand;
    std::vector<std::string> overrides;
    std::vector<fs::path> inputs;  // recorded in provenance

    /// "@run/x" -> run_dir/x; relative paths are taken from the config directory.
    /// Throws ConfigError naming `field` when the value is empty.
    [[nodiscard]] fs::path resolve(const std::string& value, const std::string& field) const;

    [[nodiscard]] std::uint64_t seed_for(const char* stream) const;

    /// Reads a manifest and records it as an input.
    DatasetManifest open_manifest(const std::string& value, const std::string& field);
};

/// Entries tagged with `split`; "all" keeps everything, as does a dataset with
/// no split tags at all.
DatasetManifest select_split(const DatasetManifest& manifest, const std::string& split);

/// SHA-256 as lowercase hex.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const fs::path& path);

using Command = void (*)(RunContext&);

void cmd_synth_fixtures(RunContext& ctx);
void cmd_extract_patches(RunContext& ctx);
void cmd_split(RunContext& ctx);
void cmd_simulate(RunContext& ctx);
void cmd_train_cyclegan(RunContext& ctx);
void cmd_train_pix2pix(RunContext& ctx);
void cmd_restore(RunContext& ctx);
void cmd_evaluate(RunContext& ctx);
void cmd_track(RunContext& ctx);
void cmd_segment(RunContext& ctx);
void cmd_quantify(RunContext& ctx);
void cmd_dose_response(RunContext& ctx);

}  // namespace hcs::cli
