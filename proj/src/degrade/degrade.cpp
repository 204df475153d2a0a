#include "hcs/degrade.hpp"

#include <cmath>
#include <random>

#include "hcs/errors.hpp"
#include "hcs/kernels.hpp"

namespace hcs {
namespace fs = std::filesystem;

std::string to_string(DegradationCase c) {
    switch (c) {
        case DegradationCase::Blur: return "blur";
        case DegradationCase::Bleed: return "bleed";
        case DegradationCase::Diffuse: return "diffuse";
    }
    return "blur";
}

void validate(const DegradationSpec& spec) {
    if (spec.name.empty()) throw ParameterError("degradation spec needs a name");
    if (!(spec.sigma_fine > 0.0) || !(spec.sigma_coarse > 0.0))
        throw ParameterError("degradation sigmas must be > 0");
    if (!(spec.noise_scale >= 0.0)) throw ParameterError("noise scale must be >= 0");
    if (spec.output_side < 0) throw ParameterError("output side must be >= 0");
    if (spec.kind == DegradationCase::Blur) return;
    const auto& p = spec.p;
    if (p.uniform) {
        if (!(0.0 <= p.lo && p.lo <= p.hi && p.hi <= 1.0))
            throw ParameterError("uniform mixing range must satisfy 0 <= lo <= hi <= 1");
    } else if (!(0.0 <= p.lo && p.lo <= 1.0)) {
        throw ParameterError("mixing weight must lie in [0, 1]");
    }
}

std::vector<DegradationSpec> standard_suite() {
    using DC = DegradationCase;
    const auto make = [](std::string name, DC kind, MixWeight p) {
        DegradationSpec s;
        s.name = std::move(name);
        s.kind = kind;
        s.p = p;
        return s;
    };
    return {
        make("1", DC::Blur, MixWeight::fixed(0.0)),
        make("2a", DC::Bleed, MixWeight::fixed(0.2)),
        make("2b", DC::Bleed, MixWeight::fixed(0.5)),
        make("2c", DC::Bleed, MixWeight::range(0.2, 0.5)),
        make("3a", DC::Diffuse, MixWeight::fixed(0.2)),
        make("3b", DC::Diffuse, MixWeight::fixed(0.5)),
        make("3c", DC::Diffuse, MixWeight::range(0.2, 0.5)),
    };
}

Rng patch_stream(std::uint64_t seed, const std::string& patch_id, const std::string& case_tag) {
    const std::uint64_t h = stable_hash(case_tag, stable_hash(patch_id) ^ 0x1f);
    return Rng{seed ^ h, "mt19937_64"};
}

double mixing_weight(const DegradationSpec& spec, const Rng& stream) {
    if (spec.kind == DegradationCase::Blur) return 0.0;
    if (!spec.p.uniform) return spec.p.lo;
    auto engine = stream.substream({"p"}).engine();
    return std::uniform_real_distribution<double>(spec.p.lo, spec.p.hi)(engine);
}

namespace {

void add_noise(Image2D& img, double scale, const Rng& stream) {
    if (scale == 0.0) return;
    auto engine = stream.engine();
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : img.pixels()) v += scale * normal(engine);
}

Image2D to_side(const Image2D& img, int side) {
    if (side == 0 || (img.height() == side && img.width() == side)) {
        Image2D copy = img;
        copy.set_type(PixelType::Float);
        return copy;
    }
    return resize(img, side, side);
}

}  // namespace

DegradedField degrade_unbinned(const ImagePatch& patch, const DegradationSpec& spec,
                               const Rng& stream) {
    validate(spec);
    validate_patch(patch);
    const Image2D tubule = to_side(patch.tubule, spec.output_side);
    const Image2D nucleus = to_side(patch.nucleus, spec.output_side);
    const auto fine = make_gaussian_kernel(spec.sigma_fine);

    DegradedField out;
    out.p = mixing_weight(spec, stream);
    out.tubule = gaussian_convolve(tubule, fine);
    switch (spec.kind) {
        case DegradationCase::Blur:
            break;
        case DegradationCase::Bleed: {
            const Image2D bleed = gaussian_convolve(nucleus, spec.sigma_coarse);
            auto dst = out.tubule.pixels();
            auto src = bleed.pixels();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += out.p * src[i];
            break;
        }
        case DegradationCase::Diffuse: {
            const Image2D diffuse = gaussian_convolve(tubule, spec.sigma_coarse);
            auto dst = out.tubule.pixels();
            auto src = diffuse.pixels();
            for (std::size_t i = 0; i < dst.size(); ++i)
                dst[i] = (1.0 - out.p) * dst[i] + out.p * src[i];
            break;
        }
    }
    add_noise(out.tubule, spec.noise_scale, stream.substream({"tubule"}));

    out.nucleus = gaussian_convolve(nucleus, fine);
    add_noise(out.nucleus, spec.noise_scale, stream.substream({"nucleus"}));
    return out;
}

ImagePatch degrade(const ImagePatch& patch, const DegradationSpec& spec, const Rng& stream) {
    DegradedField field = degrade_unbinned(patch, spec, stream);
    ImagePatch out;
    out.nucleus = to_uint8(field.nucleus);
    out.tubule = to_uint8(field.tubule);
    out.meta = patch.meta;
    return out;
}

std::vector<DatasetManifest> build_simulation_suite(const DatasetManifest& manifest,
                                                    const std::vector<DegradationSpec>& cases,
                                                    std::uint64_t seed, const fs::path& out_root) {
    for (const auto& spec : cases) validate(spec);

    std::vector<DatasetManifest> outputs;
    for (const auto& spec : cases) {
        DatasetManifest m;
        m.root = out_root / spec.name;
        m.has_degradation_column = true;
        m.entries = manifest.entries;
        for (auto& e : m.entries) {
            e.degradation_case = spec.name;
            e.patch_path = "patches/" + e.meta.patch_id();
        }
        fs::create_directories(m.root / "patches");
        outputs.push_back(std::move(m));
    }

    const auto& entries = manifest.entries;
    std::vector<std::string> errors(entries.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < entries.size(); ++i) {
        try {
            const ImagePatch original = load_patch(manifest, entries[i]);
            for (std::size_t k = 0; k < cases.size(); ++k) {
                const Rng stream = patch_stream(seed, original.meta.patch_id(), cases[k].name);
                const ImagePatch degraded = degrade(original, cases[k], stream);
                save_patch(outputs[k].root, degraded);
            }
        } catch (const std::exception& ex) {
            errors[i] = "patch " + entries[i].meta.patch_id() + ": " + ex.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw DataError(e);

    for (std::size_t k = 0; k < outputs.size(); ++k) {
        outputs[k].patch_size = cases[k].output_side > 0 ? cases[k].output_side : manifest.patch_size;
        write_manifest(outputs[k]);
    }
    return outputs;
}

}  // namespace hcs
