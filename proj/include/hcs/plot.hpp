#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hcs {

using Rgb = std::array<std::uint8_t, 3>;

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    Rgb color{31, 119, 180};
    bool dashed = false;
    bool markers = true;
};

/// Minimal raster line chart written as an RGB PNG. Text uses a built-in
/// 5x7 bitmap font (upper-case only).
struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    std::optional<double> y_min;
    std::optional<double> y_max;
    std::vector<PlotSeries> series;
    int width = 640;
    int height = 440;
};

void write_line_plot(const std::filesystem::path& path, const LinePlot& plot);

/// Distinct colors for the i-th series.
Rgb palette_color(std::size_t i);

}  // namespace hcs
