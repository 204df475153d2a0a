#include "hcs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "hcs/errors.hpp"
#include "hcs/kernels.hpp"
#include "hcs/parallel.hpp"
#include "hcs/rng.hpp"

namespace hcs {
namespace fs = std::filesystem;

namespace {

double percentile(std::vector<double> values, double q) {
    const auto k = static_cast<std::size_t>(q * static_cast<double>(values.size() - 1));
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
    return values[k];
}

}  // namespace

ImagePatch synth_cell(std::uint64_t seed, const CellStyle& style) {
    if (style.size < 16) throw ParameterError("synthetic cells need size >= 16");
    if (style.min_filaments < 0 || style.max_filaments < style.min_filaments || style.filament_scale < 0.0)
        throw ParameterError("invalid filament count range");
    std::mt19937_64 gen(seed);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); };
    std::normal_distribution<double> normal(0.0, 1.0);

    const int s = style.size;
    const double cx = s / 2.0 + uniform(-3.0, 3.0);
    const double cy = s / 2.0 + uniform(-3.0, 3.0);
    const double rn = uniform(style.nucleus_radius_lo, style.nucleus_radius_hi);
    const double ecc = uniform(0.8, 1.2);
    const double theta = uniform(0.0, std::numbers::pi);
    const double nucleus_level = uniform(120.0, 200.0);

    Image2D inside(s, s);
    for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            const double u = dx * std::cos(theta) + dy * std::sin(theta);
            const double v = -dx * std::sin(theta) + dy * std::cos(theta);
            const double r = std::hypot(u / ecc, v * ecc);
            inside(y, x) = 1.0 / (1.0 + std::exp(r - rn));
        }

    // Filaments are traced on a 2x canvas as random walks, keeping the
    // brightest amplitude per canvas pixel.
    const int cs = 2 * s;
    Image2D canvas(cs, cs);
    const int base = std::uniform_int_distribution<int>(style.min_filaments, style.max_filaments)(gen);
    const int count = static_cast<int>(std::lround(base * style.filament_scale));
    for (int k = 0; k < count; ++k) {
        const double a = uniform(0.0, 2.0 * std::numbers::pi);
        double px;
        double py;
        double dir;
        if (uniform(0.0, 1.0) < 0.6) {
            px = cx + std::cos(a) * rn;
            py = cy + std::sin(a) * rn;
            dir = a + 0.5 * normal(gen);
        } else {
            px = uniform(0.0, s);
            py = uniform(0.0, s);
            dir = uniform(0.0, 2.0 * std::numbers::pi);
        }
        const double length = uniform(30.0, 90.0);
        const double amp = uniform(40.0, 200.0);
        for (double t = 0.0; t < length; t += 0.5) {
            dir += 0.05 * normal(gen);
            px += 0.5 * std::cos(dir);
            py += 0.5 * std::sin(dir);
            const int xi = static_cast<int>(std::floor(px * 2.0));
            const int yi = static_cast<int>(std::floor(py * 2.0));
            if (xi >= 0 && xi < cs && yi >= 0 && yi < cs) canvas(yi, xi) = std::max(canvas(yi, xi), amp);
        }
    }
    const Image2D smooth = gaussian_convolve(canvas, 1.0);
    Image2D filaments(s, s);
    for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x)
            filaments(y, x) = 0.25 * (smooth(2 * y, 2 * x) + smooth(2 * y, 2 * x + 1) +
                                      smooth(2 * y + 1, 2 * x) + smooth(2 * y + 1, 2 * x + 1));
    const double scale = uniform(170.0, 230.0) /
                         (percentile({filaments.pixels().begin(), filaments.pixels().end()}, 0.995) + 1e-9);

    Image2D noise(s, s);
    for (double& v : noise.pixels()) v = normal(gen);
    const Image2D texture = gaussian_convolve(noise, 8.0);
    const double bg_level = uniform(15.0, 30.0);

    ImagePatch patch{Image2D(s, s), Image2D(s, s), {}};
    for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x) {
            const double in = inside(y, x);
            const double bg = bg_level * (1.0 + 2.4 * texture(y, x));
            patch.nucleus(y, x) = std::clamp(nucleus_level * in, 0.0, 255.0);
            patch.tubule(y, x) =
                std::clamp(filaments(y, x) * scale * (1.0 - 0.8 * in) + bg * (1.0 - 0.5 * in), 0.0, 255.0);
        }
    return patch;
}

SynthField synth_field(std::uint64_t seed, int height, int width, int cells, const CellStyle& style) {
    if (cells < 0) throw ParameterError("cell count must be >= 0");
    const int s = style.size;
    const int cols = std::max(1, width / (s + 8));
    const int rows = std::max(1, height / (s + 8));
    if (cells > rows * cols) throw ParameterError("field too small for the requested cell count");

    SynthField field{Image2D(height, width, 0.0, PixelType::UInt8), Image2D(height, width, 0.0, PixelType::UInt8), {}};
    Image2D nuc(height, width);
    Image2D tub(height, width);
    const double pitch_y = static_cast<double>(height) / rows;
    const double pitch_x = static_cast<double>(width) / cols;
    for (int c = 0; c < cells; ++c) {
        const ImagePatch cell = synth_cell(derive_seed(seed, {"cell", std::to_string(c)}), style);
        const int r0 = static_cast<int>(std::floor((c / cols + 0.5) * pitch_y)) - s / 2;
        const int c0 = static_cast<int>(std::floor((c % cols + 0.5) * pitch_x)) - s / 2;
        for (int y = 0; y < s; ++y)
            for (int x = 0; x < s; ++x) {
                const int fy = r0 + y;
                const int fx = c0 + x;
                if (fy < 0 || fy >= height || fx < 0 || fx >= width) continue;
                nuc(fy, fx) = std::max(nuc(fy, fx), cell.nucleus(y, x));
                tub(fy, fx) = std::max(tub(fy, fx), cell.tubule(y, x));
            }
        field.centres.emplace_back(r0 + s / 2, c0 + s / 2);
    }
    field.nucleus = to_uint8(nuc);
    field.tubule = to_uint8(tub);
    return field;
}

DatasetManifest write_fixture_dataset(const fs::path& out_dir, const FixtureOptions& options) {
    if (options.patches < 1) throw ParameterError("fixture dataset needs at least one patch");
    DatasetManifest manifest;
    manifest.root = out_dir;
    manifest.patch_size = options.style.size;
    std::vector<ImagePatch> patches(static_cast<std::size_t>(options.patches));
    parallel_for(patches.size(), [&](std::size_t k) {
        const int i = static_cast<int>(k);
        CellStyle style = options.style;
        char id[32];
        std::snprintf(id, sizeof id, "%04d", i);
        PatchMeta meta{options.id_prefix + id, 0, "", "", "", ""};
        if (!options.treatments.empty()) {
            const auto& t = options.treatments[static_cast<std::size_t>(i) % options.treatments.size()];
            style.filament_scale *= t.filament_scale;
            meta.compound = t.compound;
            meta.concentration = t.concentration;
            meta.mechanism = t.mechanism;
        }
        ImagePatch p = synth_cell(derive_seed(options.seed, {"fixture", std::to_string(i)}), style);
        p.nucleus = to_uint8(p.nucleus);
        p.tubule = to_uint8(p.tubule);
        p.meta = std::move(meta);
        patches[k] = std::move(p);
    });
    for (const auto& p : patches) {
        ManifestEntry e;
        e.patch_path = save_patch(out_dir, p);
        e.meta = p.meta;
        e.split = SplitTag::Train;
        manifest.entries.push_back(std::move(e));
    }
    write_manifest(manifest);
    return manifest;
}

}  // namespace hcs
