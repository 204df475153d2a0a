#include "hcs/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "hcs/errors.hpp"
#include "hcs/png_io.hpp"

namespace hcs {
namespace {

using Glyph = std::array<std::uint8_t, 7>;

const std::map<char, Glyph>& font() {
    static const std::map<char, Glyph> glyphs = {
        {' ', {0, 0, 0, 0, 0, 0, 0}},
        {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
        {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
        {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
        {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
        {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
        {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
        {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
        {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
        {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
        {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
        {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
        {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
        {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
        {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
        {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
        {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
        {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
        {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
        {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
        {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
        {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
        {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
        {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
        {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
        {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
        {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
        {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
        {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
        {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
        {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
        {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
        {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
        {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
        {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
        {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}},
        {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
        {'.', {0, 0, 0, 0, 0, 0x0C, 0x0C}},
        {',', {0, 0, 0, 0, 0x0C, 0x04, 0x08}},
        {'-', {0, 0, 0, 0x1F, 0, 0, 0}},
        {'+', {0, 0x04, 0x04, 0x1F, 0x04, 0x04, 0}},
        {'=', {0, 0, 0x1F, 0, 0x1F, 0, 0}},
        {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}},
        {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
        {':', {0, 0x0C, 0x0C, 0, 0x0C, 0x0C, 0}},
        {'_', {0, 0, 0, 0, 0, 0, 0x1F}},
        {'/', {0, 0x01, 0x02, 0x04, 0x08, 0x10, 0}},
        {'%', {0x18, 0x19, 0x02, 0x04, 0x08, 0x13, 0x03}},
        {'?', {0x0E, 0x11, 0x01, 0x02, 0x04, 0, 0x04}},
    };
    return glyphs;
}

class Canvas {
public:
    Canvas(int h, int w) : h_(h), w_(w), px_(static_cast<std::size_t>(h) * w * 3, 255) {}

    void put(int x, int y, Rgb c) {
        if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
        auto* p = &px_[(static_cast<std::size_t>(y) * w_ + x) * 3];
        p[0] = c[0];
        p[1] = c[1];
        p[2] = c[2];
    }

    void dot(int x, int y, Rgb c, int size) {
        for (int dy = 0; dy < size; ++dy)
            for (int dx = 0; dx < size; ++dx) put(x + dx - size / 2, y + dy - size / 2, c);
    }

    void line(int x0, int y0, int x1, int y1, Rgb c, int thickness = 1, bool dashed = false) {
        const int dx = std::abs(x1 - x0);
        const int dy = -std::abs(y1 - y0);
        const int sx = x0 < x1 ? 1 : -1;
        const int sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        int step = 0;
        while (true) {
            if (!dashed || (step / 6) % 2 == 0) dot(x0, y0, c, thickness);
            ++step;
            if (x0 == x1 && y0 == y1) break;
            const int e2 = 2 * err;
            if (e2 >= dy) {
                err += dy;
                x0 += sx;
            }
            if (e2 <= dx) {
                err += dx;
                y0 += sy;
            }
        }
    }

    void text(int x, int y, const std::string& s, Rgb c, int scale = 1) {
        const auto& glyphs = font();
        for (char raw : s) {
            const char ch = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
            auto it = glyphs.find(ch);
            const Glyph& g = it != glyphs.end() ? it->second : glyphs.at('?');
            for (int r = 0; r < 7; ++r)
                for (int col = 0; col < 5; ++col)
                    if (g[r] & (0x10 >> col))
                        for (int sy = 0; sy < scale; ++sy)
                            for (int sx = 0; sx < scale; ++sx)
                                put(x + col * scale + sx, y + r * scale + sy, c);
            x += 6 * scale;
        }
    }

    static int text_width(const std::string& s, int scale = 1) {
        return static_cast<int>(s.size()) * 6 * scale;
    }

    void vertical_text(int x, int y, const std::string& s, Rgb c) {
        // Rendered bottom-to-top, one glyph per 6 px.
        const auto& glyphs = font();
        for (char raw : s) {
            const char ch = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
            auto it = glyphs.find(ch);
            const Glyph& g = it != glyphs.end() ? it->second : glyphs.at('?');
            for (int r = 0; r < 7; ++r)
                for (int col = 0; col < 5; ++col)
                    if (g[r] & (0x10 >> col)) put(x + r, y - col, c);
            y -= 6;
        }
    }

    [[nodiscard]] const std::vector<std::uint8_t>& bytes() const { return px_; }

private:
    int h_;
    int w_;
    std::vector<std::uint8_t> px_;
};

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace

Rgb palette_color(std::size_t i) {
    static constexpr std::array<Rgb, 8> colors = {{{31, 119, 180},
                                                   {255, 127, 14},
                                                   {44, 160, 44},
                                                   {214, 39, 40},
                                                   {148, 103, 189},
                                                   {140, 86, 75},
                                                   {227, 119, 194},
                                                   {23, 190, 207}}};
    return colors[i % colors.size()];
}

void write_line_plot(const std::filesystem::path& path, const LinePlot& plot) {
    constexpr int left = 70;
    constexpr int right = 170;
    constexpr int top = 40;
    constexpr int bottom = 55;
    const Rgb black{0, 0, 0};
    const Rgb grey{200, 200, 200};
    if (plot.width < left + right + 50 || plot.height < top + bottom + 50)
        throw ParameterError("plot canvas too small");

    const auto tx = [&](double x) { return plot.log_x ? std::log10(x) : x; };

    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = x_lo;
    double y_hi = -x_lo;
    for (const auto& s : plot.series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (plot.log_x && !(s.x[i] > 0.0)) continue;
            if (!std::isfinite(s.y[i])) continue;
            x_lo = std::min(x_lo, tx(s.x[i]));
            x_hi = std::max(x_hi, tx(s.x[i]));
            y_lo = std::min(y_lo, s.y[i]);
            y_hi = std::max(y_hi, s.y[i]);
        }
    }
    if (!std::isfinite(x_lo)) {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if (x_hi == x_lo) {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if (y_hi == y_lo) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo = plot.y_min.value_or(y_lo - pad);
    y_hi = plot.y_max.value_or(y_hi + pad);

    const int pw = plot.width - left - right;
    const int ph = plot.height - top - bottom;
    const auto px = [&](double x) {
        return left + static_cast<int>(std::lround((tx(x) - x_lo) / (x_hi - x_lo) * pw));
    };
    const auto py = [&](double y) {
        return top + ph - static_cast<int>(std::lround((y - y_lo) / (y_hi - y_lo) * ph));
    };

    Canvas cv(plot.height, plot.width);

    // Grid and ticks.
    for (int k = 0; k <= 4; ++k) {
        const double yv = y_lo + (y_hi - y_lo) * k / 4.0;
        const int y = py(yv);
        cv.line(left, y, left + pw, y, grey);
        const std::string label = tick_label(yv);
        cv.text(left - 6 - Canvas::text_width(label), y - 3, label, black);
    }
    if (plot.log_x) {
        for (int e = static_cast<int>(std::ceil(x_lo - 1e-9)); e <= static_cast<int>(std::floor(x_hi + 1e-9)); ++e) {
            const int x = left + static_cast<int>(std::lround((e - x_lo) / (x_hi - x_lo) * pw));
            cv.line(x, top, x, top + ph, grey);
            const std::string label = "1E" + std::to_string(e);
            cv.text(x - Canvas::text_width(label) / 2, top + ph + 8, label, black);
        }
    } else {
        for (int k = 0; k <= 4; ++k) {
            const double xv = x_lo + (x_hi - x_lo) * k / 4.0;
            const int x = left + static_cast<int>(std::lround(k / 4.0 * pw));
            cv.line(x, top, x, top + ph, grey);
            const std::string label = tick_label(xv);
            cv.text(x - Canvas::text_width(label) / 2, top + ph + 8, label, black);
        }
    }
    cv.line(left, top, left, top + ph, black);
    cv.line(left, top + ph, left + pw, top + ph, black);
    cv.line(left, top, left + pw, top, black);
    cv.line(left + pw, top, left + pw, top + ph, black);

    // Series.
    for (std::size_t si = 0; si < plot.series.size(); ++si) {
        const auto& s = plot.series[si];
        int prev_x = 0;
        int prev_y = 0;
        bool have_prev = false;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if ((plot.log_x && !(s.x[i] > 0.0)) || !std::isfinite(s.y[i])) continue;
            const int x = px(s.x[i]);
            const int y = std::clamp(py(s.y[i]), top, top + ph);
            if (have_prev) cv.line(prev_x, prev_y, x, y, s.color, 2, s.dashed);
            if (s.markers) cv.dot(x, y, s.color, 5);
            prev_x = x;
            prev_y = y;
            have_prev = true;
        }
        const int ly = top + 10 + static_cast<int>(si) * 14;
        cv.line(left + pw + 10, ly + 3, left + pw + 30, ly + 3, s.color, 2, s.dashed);
        cv.text(left + pw + 36, ly, s.label.substr(0, 21), black);
    }

    cv.text((plot.width - Canvas::text_width(plot.title, 2)) / 2, 10, plot.title, black, 2);
    cv.text(left + (pw - Canvas::text_width(plot.x_label)) / 2, plot.height - 20, plot.x_label, black);
    cv.vertical_text(12, top + ph / 2 + Canvas::text_width(plot.y_label) / 2, plot.y_label, black);

    write_png_rgb(path, plot.height, plot.width, cv.bytes());
}

}  // namespace hcs
