#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hcs/manifest.hpp"
#include "hcs/patch.hpp"
#include "hcs/rng.hpp"

namespace hcs {

enum class DegradationCase { Blur, Bleed, Diffuse };

std::string to_string(DegradationCase c);

/// Mixing weight p: fixed, or drawn per patch from U[lo, hi].
struct MixWeight {
    bool uniform = false;
    double lo = 0.0;
    double hi = 0.0;

    static MixWeight fixed(double p) { return {false, p, p}; }
    static MixWeight range(double lo, double hi) { return {true, lo, hi}; }
};

/// Simulated acquisition of a low-quality image from a high-quality patch:
///   Blur:    g_fine * T + s*eps
///   Bleed:   g_fine * T + p*(g_coarse * N) + s*eps
///   Diffuse: (1-p)*(g_fine * T) + p*(g_coarse * T) + s*eps
/// with T/N the tubule/nucleus channels after down-sampling to `output_side`.
struct DegradationSpec {
    std::string name;  // dataset tag, e.g. "2b"; also keys the noise stream
    DegradationCase kind = DegradationCase::Blur;
    double sigma_fine = 1.0;
    double sigma_coarse = 5.0;
    double noise_scale = 3.0;  // 8-bit units
    MixWeight p = MixWeight::fixed(0.0);
    int output_side = 84;  // 0 keeps the input size
};

/// Throws ParameterError on out-of-range fields.
void validate(const DegradationSpec& spec);

/// Cases 1, 2a-c, 3a-c with p = 0.2, 0.5, U[0.2, 0.5].
std::vector<DegradationSpec> standard_suite();

/// Per-patch stream: seed XOR hash(patch_id, case tag).
Rng patch_stream(std::uint64_t seed, const std::string& patch_id, const std::string& case_tag);

/// p for this patch (0 for Blur); reproducible from the patch stream alone.
double mixing_weight(const DegradationSpec& spec, const Rng& stream);

/// Degraded channels before 8-bit binning.
struct DegradedField {
    Image2D nucleus;
    Image2D tubule;
    double p = 0.0;
};

DegradedField degrade_unbinned(const ImagePatch& patch, const DegradationSpec& spec,
                               const Rng& stream);

/// degrade_unbinned followed by to_uint8 on both channels.
ImagePatch degrade(const ImagePatch& patch, const DegradationSpec& spec, const Rng& stream);

/// Writes one degraded dataset per spec under `out_root/<spec.name>/`, each
/// keeping the input's patch stems so restored and original patches pair by id.
std::vector<DatasetManifest> build_simulation_suite(const DatasetManifest& manifest,
                                                    const std::vector<DegradationSpec>& cases,
                                                    std::uint64_t seed,
                                                    const std::filesystem::path& out_root);

}  // namespace hcs
