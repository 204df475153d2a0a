#include "hcs/morphology.hpp"

#include <utility>

#include "hcs/errors.hpp"

namespace hcs {

std::vector<Component> connected_components(const BinaryMask& mask) {
    const int h = mask.height();
    const int w = mask.width();
    std::vector<int> labels(mask.size(), 0);
    std::vector<Component> out;
    std::vector<std::pair<int, int>> stack;

    for (int r0 = 0; r0 < h; ++r0) {
        for (int c0 = 0; c0 < w; ++c0) {
            if (!mask(r0, c0) || labels[static_cast<std::size_t>(r0) * w + c0] != 0) continue;
            Component comp;
            comp.label = static_cast<int>(out.size()) + 1;
            double sum_r = 0.0;
            double sum_c = 0.0;
            stack.assign(1, {r0, c0});
            labels[static_cast<std::size_t>(r0) * w + c0] = comp.label;
            while (!stack.empty()) {
                const auto [r, c] = stack.back();
                stack.pop_back();
                ++comp.area;
                sum_r += r;
                sum_c += c;
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int rr = r + dr;
                        const int cc = c + dc;
                        if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
                        auto& l = labels[static_cast<std::size_t>(rr) * w + cc];
                        if (l != 0 || !mask(rr, cc)) continue;
                        l = comp.label;
                        stack.emplace_back(rr, cc);
                    }
                }
            }
            comp.centroid_row = sum_r / static_cast<double>(comp.area);
            comp.centroid_col = sum_c / static_cast<double>(comp.area);
            out.push_back(comp);
        }
    }
    return out;
}

BinaryMask dilate_euclidean(const BinaryMask& mask, int radius) {
    if (radius < 0) throw ParameterError("dilation radius must be >= 0");
    std::vector<std::pair<int, int>> offsets;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dy * dy + dx * dx <= radius * radius) offsets.emplace_back(dy, dx);

    const int h = mask.height();
    const int w = mask.width();
    BinaryMask out(h, w);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            for (const auto& [dy, dx] : offsets) {
                const int rr = r + dy;
                const int cc = c + dx;
                if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
                if (mask(rr, cc)) {
                    out.set(r, c, true);
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace hcs
