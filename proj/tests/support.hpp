#pragma once

#include <vector>

#include "oracles.hpp"
#include "vgrt/vgrt.hpp"

namespace support {

inline vgrt::Region unit_square() { return vgrt::Region(vgrt::make_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}})); }

inline vgrt::Region l_shape() {
    return vgrt::Region(vgrt::make_polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}));
}

inline vgrt::Region rect(double x0, double y0, double x1, double y1) {
    return vgrt::Region(vgrt::make_polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}));
}

inline std::vector<oracle::Ring> rings(const vgrt::Region& r) {
    std::vector<oracle::Ring> out;
    for (const auto& piece : r.pieces()) {
        oracle::Ring ring;
        for (auto v : piece.vertices) ring.push_back({v.x, v.y});
        out.push_back(ring);
    }
    return out;
}

inline vgrt::RefinementParams wavelet_params(int depth) {
    vgrt::RefinementParams p;
    p.multiplicity = 4;
    p.dispersion = 0.5;
    p.base_angle = 0.25 * 3.14159265358979323846;
    p.max_depth = depth;
    return p;
}

inline vgrt::RefinementParams params(int n, double dispersion, double angle, int depth) {
    vgrt::RefinementParams p;
    p.multiplicity = n;
    p.dispersion = dispersion;
    p.base_angle = angle;
    p.max_depth = depth;
    return p;
}

} // namespace support
