#pragma once

// Slab mode: multiplicity 2 with dispersion 1/2 cuts the domain into thin
// strips perpendicular to one direction. Single-angle reconstructions are
// constant along the strips; averaging K of them over angles pi*i/K
// spreads those artifacts out.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "error.hpp"
#include "field.hpp"
#include "refinement.hpp"
#include "transform.hpp"

namespace vgrt {

struct RadonConfig {
    int angles_count = 1;  // K
    int depth = 8;
    Region domain;
    Field field = AnalyticField::constant(0.0);
    GridSpec grid;
    QuadratureSpec quad{};
    /// K values for the error curve; empty means powers of two up to K, then K.
    std::vector<int> curve_k;
};

struct RadonResult {
    RasterField averaged;
    std::vector<std::uint8_t> mask;
    std::vector<double> per_angle_rmse;  // the K single-angle reconstructions
    double averaged_rmse = 0.0;
    std::vector<std::pair<int, double>> rmse_vs_k;
};

inline RefinementParams slab_params(double angle, int depth) {
    RefinementParams p;
    p.multiplicity = 2;
    p.dispersion = 0.5;
    p.base_angle = angle;
    p.rotation_per_level = 0.0;
    p.max_depth = depth;
    return p;
}

/// Deepest-level reconstruction of f from the slab tree at `angle`.
inline Reconstruction radon_reconstruct_single(const Field& field, const Region& domain, double angle, int depth,
                                               const GridSpec& grid, const QuadratureSpec& quad = {}) {
    if (depth < 1) throw Error(ErrorCode::InvalidArgument, "slab depth must be >= 1");
    const RefinementTree tree = refine(domain, slab_params(angle, depth));
    return reconstruct_raster(forward(tree, field, quad), tree, depth, grid);
}

/// RMSE of a reconstruction against f sampled at the masked pixel centers.
inline double raster_rmse(const Reconstruction& rec, const Field& field) {
    double acc = 0.0;
    std::size_t count = 0;
    for (int j = 0; j < rec.raster.height; ++j)
        for (int i = 0; i < rec.raster.width; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * static_cast<std::size_t>(rec.raster.width) +
                                  static_cast<std::size_t>(i);
            if (!rec.mask[k]) continue;
            const double d = rec.raster.values[k] - evaluate(field, rec.raster.pixel_center(i, j));
            acc += d * d;
            ++count;
        }
    if (count == 0) throw Error(ErrorCode::EmptyQuadrature, "no output pixel lies inside the domain");
    return std::sqrt(acc / static_cast<double>(count));
}

namespace detail {

inline std::vector<int> default_curve(int k) {
    std::vector<int> out;
    for (int p = 1; p < k; p *= 2) out.push_back(p);
    out.push_back(k);
    return out;
}

// Mean of the reconstructions at angles pi*i/k, i = 0..k-1, summed in order.
template <class Lookup>
Reconstruction average_over(int k, Lookup&& single) {
    Reconstruction avg = single(0, k);
    for (int i = 1; i < k; ++i) {
        const Reconstruction& r = single(i, k);
        for (std::size_t p = 0; p < avg.raster.values.size(); ++p) avg.raster.values[p] += r.raster.values[p];
    }
    for (double& v : avg.raster.values) v /= static_cast<double>(k);
    return avg;
}

} // namespace detail

inline RadonResult radon_average(const RadonConfig& config) {
    if (config.angles_count < 1) throw Error(ErrorCode::InvalidArgument, "angle count must be >= 1");
    std::vector<int> curve = config.curve_k.empty() ? detail::default_curve(config.angles_count) : config.curve_k;
    for (int k : curve)
        if (k < 1) throw Error(ErrorCode::InvalidArgument, "curve K values must be >= 1");

    // Angles are cached by the reduced fraction i/k so nested grids share work.
    std::map<std::pair<int, int>, Reconstruction> cache;
    auto single = [&](int i, int k) -> const Reconstruction& {
        const int g = std::gcd(i, k);
        const std::pair<int, int> key{i / g, k / g};
        auto it = cache.find(key);
        if (it == cache.end()) {
            const double angle = std::numbers::pi * key.first / key.second;
            it = cache.emplace(key, radon_reconstruct_single(config.field, config.domain, angle, config.depth,
                                                             config.grid, config.quad)).first;
        }
        return it->second;
    };

    RadonResult result;
    for (int i = 0; i < config.angles_count; ++i)
        result.per_angle_rmse.push_back(raster_rmse(single(i, config.angles_count), config.field));
    Reconstruction avg = detail::average_over(config.angles_count, single);
    result.averaged_rmse = raster_rmse(avg, config.field);
    for (int k : curve) {
        const double rmse = k == config.angles_count ? result.averaged_rmse
                                                     : raster_rmse(detail::average_over(k, single), config.field);
        result.rmse_vs_k.emplace_back(k, rmse);
    }
    result.averaged = std::move(avg.raster);
    result.mask = std::move(avg.mask);
    return result;
}

} // namespace vgrt
