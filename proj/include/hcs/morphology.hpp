#pragma once

#include <vector>

#include "hcs/image.hpp"

namespace hcs {

struct Component {
    int label = 0;
    long area = 0;
    double centroid_row = 0.0;
    double centroid_col = 0.0;
};

/// 8-connected components of `mask`, in raster order of their first pixel.
std::vector<Component> connected_components(const BinaryMask& mask);

/// {p : euclidean distance from p to `mask` <= radius}, clipped to the mask frame.
BinaryMask dilate_euclidean(const BinaryMask& mask, int radius);

}  // namespace hcs
