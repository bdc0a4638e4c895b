#pragma once

// Forward transform (child average minus parent average) and the partial
// reconstructions f_m built from ancestor-chain sums.

#include <cstdint>
#include <vector>

#include "error.hpp"
#include "field.hpp"
#include "parallel.hpp"
#include "refinement.hpp"

namespace vgrt {

struct CoefficientEntry {
    double coeff = 0.0;    // root: the absolute average; otherwise child minus parent average
    double measure = 0.0;  // 0 marks a skipped (degenerate) node
    Point generator{};
};

/// Coefficients of every node, stored densely per level in index order.
struct CoefficientSet {
    RefinementParams params;
    std::vector<std::vector<CoefficientEntry>> levels;

    int multiplicity() const { return params.multiplicity; }
    int depth() const { return static_cast<int>(levels.size()) - 1; }
    double root_average() const { return levels.at(0).at(0).coeff; }
    const CoefficientEntry& at(NodeIndex id) const {
        return levels.at(static_cast<std::size_t>(id.level)).at(static_cast<std::size_t>(id.index));
    }
};

/// Average of f over every node, level by level (skipped nodes inherit the
/// parent value). CellFields laid out on the same tree are averaged exactly
/// from their leaf values instead of by quadrature.
inline std::vector<std::vector<double>> node_averages(const RefinementTree& tree, const Field& field,
                                                      const QuadratureSpec& quad = {}) {
    const auto n = static_cast<std::size_t>(tree.multiplicity());
    std::vector<std::vector<double>> avg(tree.levels.size());
    for (std::size_t m = 0; m < tree.levels.size(); ++m) avg[m].resize(tree.levels[m].size());

    if (const auto* cells = std::get_if<CellField>(&field); cells && cells->matches(tree)) {
        auto& leaves = avg.back();
        for (std::size_t i = 0; i < leaves.size(); ++i) leaves[i] = cells->leaf_values[i];
        std::vector<std::vector<double>> mass(tree.levels.size());
        mass.back().resize(leaves.size());
        for (std::size_t i = 0; i < leaves.size(); ++i) mass.back()[i] = tree.levels.back()[i].measure;
        for (std::size_t m = tree.levels.size() - 1; m-- > 0;) {
            mass[m].assign(tree.levels[m].size(), 0.0);
            for (std::size_t i = 0; i < tree.levels[m].size(); ++i) {
                double weighted = 0.0, total = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    weighted += mass[m + 1][i * n + k] * avg[m + 1][i * n + k];
                    total += mass[m + 1][i * n + k];
                }
                mass[m][i] = total;
                avg[m][i] = total > 0.0 ? weighted / total : 0.0;
            }
        }
        // Skipped nodes take their parent's value so their coefficient is 0.
        for (std::size_t m = 1; m < tree.levels.size(); ++m)
            for (std::size_t i = 0; i < tree.levels[m].size(); ++i)
                if (tree.levels[m][i].skipped) avg[m][i] = avg[m - 1][i / n];
        return avg;
    }

    avg[0][0] = average(field, tree.domain, quad);
    for (std::size_t m = 1; m < tree.levels.size(); ++m) {
        const auto& level = tree.levels[m];
        parallel_for(level.size(), [&](std::size_t i) {
            avg[m][i] = level[i].skipped ? avg[m - 1][i / n] : average(field, level[i].region, quad);
        });
    }
    return avg;
}

inline CoefficientSet coefficients_from_averages(const RefinementTree& tree,
                                                 const std::vector<std::vector<double>>& avg) {
    const auto n = static_cast<std::size_t>(tree.multiplicity());
    CoefficientSet set{tree.params, {}};
    set.levels.resize(tree.levels.size());
    for (std::size_t m = 0; m < tree.levels.size(); ++m) {
        const auto& level = tree.levels[m];
        auto& out = set.levels[m];
        out.resize(level.size());
        for (std::size_t i = 0; i < level.size(); ++i) {
            out[i].generator = level[i].generator;
            out[i].measure = level[i].skipped ? 0.0 : level[i].measure;
            out[i].coeff = m == 0 ? avg[0][0] : (level[i].skipped ? 0.0 : avg[m][i] - avg[m - 1][i / n]);
        }
    }
    return set;
}

inline CoefficientSet forward(const RefinementTree& tree, const Field& field, const QuadratureSpec& quad = {}) {
    return coefficients_from_averages(tree, node_averages(tree, field, quad));
}

/// Per-level values of the partial reconstructions: value of f_m on node
/// (m, i) is the root average plus the coefficients along its ancestor chain.
inline std::vector<std::vector<double>> chain_sums(const CoefficientSet& coeffs) {
    const auto n = static_cast<std::size_t>(coeffs.multiplicity());
    std::vector<std::vector<double>> out(coeffs.levels.size());
    out[0] = {coeffs.root_average()};
    for (std::size_t m = 1; m < coeffs.levels.size(); ++m) {
        out[m].resize(coeffs.levels[m].size());
        for (std::size_t i = 0; i < out[m].size(); ++i) out[m][i] = out[m - 1][i / n] + coeffs.levels[m][i].coeff;
    }
    return out;
}

namespace detail {
inline void check_compatible(const CoefficientSet& coeffs, const RefinementTree& tree) {
    if (coeffs.multiplicity() != tree.multiplicity() || coeffs.depth() != tree.depth())
        throw Error(ErrorCode::InvalidArgument, "coefficients were not computed on this tree");
}

inline void check_level(int level, int depth) {
    if (level < 0 || level > depth) throw Error(ErrorCode::InvalidArgument, "reconstruction level outside the tree depth");
}
} // namespace detail

/// f_level(x): the root average plus the coefficients of the ancestor chain
/// of the level-`level` cell containing x.
inline double reconstruct_point(const CoefficientSet& coeffs, const RefinementTree& tree, Point x, int level) {
    detail::check_compatible(coeffs, tree);
    detail::check_level(level, tree.depth());
    NodeIndex id = locate(tree, x, level);
    double value = coeffs.root_average();
    for (; id.level > 0; id = parent_of(id, tree.multiplicity())) value += coeffs.at(id).coeff;
    return value;
}

/// Pixel grid for rasterized output; pixel (i, j) centered at
/// origin + ((i + 0.5) * pixel_size, (j + 0.5) * pixel_size).
struct GridSpec {
    int width = 0;
    int height = 0;
    Point origin{};
    double pixel_size = 1.0;

    /// Square pixels covering `box` with the given pixel counts.
    static GridSpec covering(const BoundingBox& box, int width, int height) {
        if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "grid size must be positive");
        return {width, height, box.lo, std::max(box.width() / width, box.height() / height)};
    }
};

struct Reconstruction {
    int level = 0;
    RasterField raster;
    std::vector<std::uint8_t> mask;  // 1 where the pixel center lies in the domain
};

inline Reconstruction reconstruct_raster(const CoefficientSet& coeffs, const RefinementTree& tree, int level,
                                         const GridSpec& grid) {
    detail::check_compatible(coeffs, tree);
    detail::check_level(level, tree.depth());
    Reconstruction out{level, RasterField::zeros(grid.width, grid.height, grid.origin, grid.pixel_size), {}};
    out.mask.assign(out.raster.values.size(), 0);
    const auto values = chain_sums(coeffs);
    const auto& at_level = values[static_cast<std::size_t>(level)];
    const double tol = tree.domain.eps();
    parallel_for(static_cast<std::size_t>(grid.height), [&](std::size_t row) {
        const int j = static_cast<int>(row);
        for (int i = 0; i < grid.width; ++i) {
            const Point c = out.raster.pixel_center(i, j);
            if (!contains_closed(tree.domain, c, tol)) continue;
            const NodeIndex id = locate(tree, c, level);
            out.raster.at(i, j) = at_level[static_cast<std::size_t>(id.index)];
            out.mask[row * static_cast<std::size_t>(grid.width) + static_cast<std::size_t>(i)] = 1;
        }
    });
    return out;
}

/// The deepest-level piecewise-constant function with these coefficients.
inline CellField synthesize(const RefinementTree& tree, const CoefficientSet& coeffs) {
    detail::check_compatible(coeffs, tree);
    auto values = chain_sums(coeffs);
    return CellField::on_tree(tree, std::move(values.back()));
}

/// ||f_m||^2 = sum over level-m cells of measure * (cell value)^2.
inline double partial_norm_sq(const CoefficientSet& coeffs, int level) {
    detail::check_level(level, coeffs.depth());
    const auto values = chain_sums(coeffs);
    double acc = 0.0;
    const auto m = static_cast<std::size_t>(level);
    for (std::size_t i = 0; i < values[m].size(); ++i) acc += coeffs.levels[m][i].measure * values[m][i] * values[m][i];
    return acc;
}

/// sum of measure * coeff^2 over all nodes, optionally including the root.
inline double coefficient_energy(const CoefficientSet& coeffs, bool include_root) {
    double acc = 0.0;
    for (std::size_t m = include_root ? 0 : 1; m < coeffs.levels.size(); ++m)
        for (const auto& e : coeffs.levels[m]) acc += e.measure * e.coeff * e.coeff;
    return acc;
}

/// ||f - f_m||_2^2 integrated cell by cell with the given quadrature (pixel
/// sums for rasters); does not use the algebraic identity with coefficients.
inline double approximation_error_sq(const RefinementTree& tree, const CoefficientSet& coeffs, const Field& field,
                                     int level, const QuadratureSpec& quad = {}) {
    detail::check_compatible(coeffs, tree);
    detail::check_level(level, tree.depth());
    const auto values = chain_sums(coeffs);
    const auto m = static_cast<std::size_t>(level);
    const auto& nodes = tree.levels[m];
    std::vector<double> per_cell(nodes.size(), 0.0);
    const auto* raster = std::get_if<RasterField>(&field);
    parallel_for(nodes.size(), [&](std::size_t i) {
        if (nodes[i].skipped) return;
        const double v = values[m][i];
        const Region& cell = nodes[i].region;
        if (raster) {
            const double area_px = raster->pixel_size * raster->pixel_size;
            double acc = 0.0;
            detail::for_each_pixel_in(*raster, cell, [&](int c, int j) {
                const double d = raster->at(c, j) - v;
                acc += d * d * area_px;
            });
            per_cell[i] = acc;
            return;
        }
        auto err2 = [&](Point x) {
            const double d = evaluate(field, x) - v;
            return d * d;
        };
        per_cell[i] = detail::gauss_integral(err2, cell, quad);
    });
    double total = 0.0;
    for (double e : per_cell) total += e;
    return total;
}

} // namespace vgrt
