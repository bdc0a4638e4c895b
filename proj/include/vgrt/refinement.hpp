#pragma once

// Hierarchical refinement: each parent generator spawns N daughters along a
// fan of directions, pushed a fraction `dispersion` of the way to the parent
// cell boundary, and the parent cell is split into their Voronoi cells.

#include <cmath>
#include <compare>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

namespace vgrt {

enum class DegeneracyPolicy { Strict, Permissive };

inline const char* to_string(DegeneracyPolicy p) { return p == DegeneracyPolicy::Strict ? "strict" : "permissive"; }

struct RefinementParams {
    int multiplicity = 4;
    double dispersion = 0.5;
    double base_angle = 0.0;          // radians; 0 points the first daughter along +x
    double rotation_per_level = 0.0;  // radians added per level
    int max_depth = 0;
    double min_cell_area = 0.0;
    DegeneracyPolicy policy = DegeneracyPolicy::Strict;
    std::optional<Point> root_generator;  // defaults to the domain centroid

    /// Fan angle used when placing the daughters that form `level` (>= 1).
    double level_angle(int level) const { return base_angle + (level - 1) * rotation_per_level; }
};

/// Hard cap on the node count of a tree, to reject runaway depth requests.
inline constexpr std::uint64_t kMaxTreeNodes = 20'000'000;

inline std::uint64_t nodes_at_level(int multiplicity, int level) {
    std::uint64_t count = 1;
    for (int i = 0; i < level; ++i) count *= static_cast<std::uint64_t>(multiplicity);
    return count;
}

inline void validate(const RefinementParams& p) {
    auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
    if (p.multiplicity < 2) bad("multiplicity must be >= 2");
    if (!std::isfinite(p.dispersion)) bad("dispersion must be finite");
    if (p.policy == DegeneracyPolicy::Strict && !(p.dispersion > 0.0 && p.dispersion < 1.0))
        bad("dispersion must lie in (0, 1) under the strict policy");
    if (p.policy == DegeneracyPolicy::Permissive && !(p.dispersion >= 0.0 && p.dispersion <= 1.0))
        bad("dispersion must lie in [0, 1]");
    if (!std::isfinite(p.base_angle) || !std::isfinite(p.rotation_per_level)) bad("angles must be finite");
    if (p.max_depth < 0) bad("depth must be >= 0");
    if (!(p.min_cell_area >= 0.0)) bad("min_cell_area must be >= 0");
    if (p.root_generator && !is_finite(*p.root_generator)) bad("root generator must be finite");
    double total = 0.0;
    for (int m = 0; m <= p.max_depth; ++m) {
        total += std::pow(static_cast<double>(p.multiplicity), m);
        if (total > static_cast<double>(kMaxTreeNodes)) bad("tree would exceed the node cap");
    }
}

/// (level, index) with 0 <= index < N^level. Child k of (m, n) is (m+1, nN+k).
struct NodeIndex {
    int level = 0;
    std::uint64_t index = 0;

    friend auto operator<=>(const NodeIndex&, const NodeIndex&) = default;
};

inline NodeIndex parent_of(NodeIndex id, int multiplicity) {
    if (id.level < 1) throw Error(ErrorCode::RootHasNoParent, "the root node has no parent");
    if (multiplicity < 2) throw Error(ErrorCode::InvalidArgument, "multiplicity must be >= 2");
    return {id.level - 1, id.index / static_cast<std::uint64_t>(multiplicity)};
}

inline NodeIndex child_of(NodeIndex id, int multiplicity, int k) {
    if (k < 0 || k >= multiplicity) throw Error(ErrorCode::InvalidArgument, "child slot out of range");
    return {id.level + 1, id.index * static_cast<std::uint64_t>(multiplicity) + static_cast<std::uint64_t>(k)};
}

/// Nesting test by index arithmetic alone: floor(n1 / N^(m1-m2)) == n2.
inline bool is_descendant(NodeIndex descendant, NodeIndex ancestor, int multiplicity) {
    if (descendant.level <= ancestor.level) return false;
    const std::uint64_t scale = nodes_at_level(multiplicity, descendant.level - ancestor.level);
    return descendant.index / scale == ancestor.index;
}

struct RefinementNode {
    NodeIndex id;
    Point generator;
    Region region;
    double measure = 0.0;
    bool skipped = false;  // degenerate under the permissive policy; carries no coefficient
};

struct RefinementTree {
    Region domain;
    RefinementParams params;
    std::vector<std::vector<RefinementNode>> levels;

    int depth() const { return static_cast<int>(levels.size()) - 1; }
    int multiplicity() const { return params.multiplicity; }
    const RefinementNode& root() const { return levels.at(0).at(0); }
    const RefinementNode& node(NodeIndex id) const {
        return levels.at(static_cast<std::size_t>(id.level)).at(static_cast<std::size_t>(id.index));
    }
    std::size_t node_count() const {
        std::size_t n = 0;
        for (const auto& l : levels) n += l.size();
        return n;
    }
};

/// Daughter generators of `parent` forming `level` (the children's level, >= 1).
inline std::vector<Point> place_children(const RefinementNode& parent, const RefinementParams& params, int level) {
    if (params.multiplicity < 2) throw Error(ErrorCode::InvalidArgument, "multiplicity must be >= 2");
    if (level < 1) throw Error(ErrorCode::InvalidArgument, "children level must be >= 1");
    const int n = params.multiplicity;
    const double start = params.level_angle(level);
    std::vector<Point> children;
    children.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const Point dir = unit_vector(start + 2.0 * std::numbers::pi * k / n);
        double alpha = 0.0;
        try {
            alpha = ray_first_exit(parent.region, parent.generator, dir);
        } catch (const Error& e) {
            // A generator left on its cell boundary (dispersion 1) cannot move.
            if (params.policy == DegeneracyPolicy::Strict || e.code() != ErrorCode::OriginOutsideRegion) throw;
        }
        children.push_back(parent.generator + (params.dispersion * alpha) * dir);
    }
    if (params.policy == DegeneracyPolicy::Strict) {
        const double eps = parent.region.eps();
        for (std::size_t i = 0; i < children.size(); ++i)
            for (std::size_t j = i + 1; j < children.size(); ++j)
                if (distance(children[i], children[j]) <= eps)
                    throw Error(ErrorCode::DegenerateConfiguration, "daughter generators coincide");
    }
    return children;
}

namespace detail {

// Permissive partition: a generator repeating an earlier one gets no cell.
inline std::vector<Region> partition_permissive(const Region& parent, std::span<const Point> gens) {
    const double eps = parent.eps();
    std::vector<std::optional<std::size_t>> unique_slot(gens.size());
    std::vector<Point> unique;
    for (std::size_t k = 0; k < gens.size(); ++k) {
        bool dup = false;
        for (Point u : unique) dup = dup || distance(u, gens[k]) <= eps;
        if (!dup) {
            unique_slot[k] = unique.size();
            unique.push_back(gens[k]);
        }
    }
    std::vector<Region> cells = voronoi_partition(parent, unique);
    std::vector<Region> out(gens.size());
    for (std::size_t k = 0; k < gens.size(); ++k)
        if (unique_slot[k]) out[k] = cells[*unique_slot[k]];
    return out;
}

inline std::vector<RefinementNode> refine_parent(const RefinementNode& parent, const RefinementParams& params,
                                                 int level) {
    const int n = params.multiplicity;
    std::vector<RefinementNode> children(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) children[static_cast<std::size_t>(k)].id = child_of(parent.id, n, k);
    if (parent.skipped) {
        for (auto& c : children) {
            c.generator = parent.generator;
            c.skipped = true;
        }
        return children;
    }
    const std::vector<Point> gens = place_children(parent, params, level);
    std::vector<Region> cells = params.policy == DegeneracyPolicy::Strict
                                    ? voronoi_partition(parent.region, gens)
                                    : partition_permissive(parent.region, gens);
    for (int k = 0; k < n; ++k) {
        auto& c = children[static_cast<std::size_t>(k)];
        c.generator = gens[static_cast<std::size_t>(k)];
        Region& cell = cells[static_cast<std::size_t>(k)];
        const bool too_small = cell.empty() || cell.area() <= 0.0 || cell.area() < params.min_cell_area;
        if (too_small) {
            if (params.policy == DegeneracyPolicy::Strict)
                throw Error(ErrorCode::EmptyCell, "cell (" + std::to_string(c.id.level) + ", " +
                                                      std::to_string(c.id.index) + ") is below the minimum area");
            c.skipped = true;
            continue;
        }
        c.measure = cell.area();
        c.region = std::move(cell);
    }
    return children;
}

} // namespace detail

/// Breadth-first construction down to params.max_depth.
inline RefinementTree refine(const Region& domain, const RefinementParams& params) {
    validate(params);
    if (domain.empty() || !(domain.area() > 0.0))
        throw Error(ErrorCode::DegenerateGeometry, "domain has no area");
    const Point root_gen = params.root_generator.value_or(region_centroid(domain));
    if (!strictly_inside(domain, root_gen))
        throw Error(ErrorCode::GeneratorOutsideParent,
                    "root generator is not strictly inside the domain; supply one explicitly");

    RefinementTree tree{domain, params, {}};
    tree.levels.reserve(static_cast<std::size_t>(params.max_depth) + 1);
    tree.levels.push_back({RefinementNode{{0, 0}, root_gen, domain, domain.area(), false}});

    const auto n = static_cast<std::size_t>(params.multiplicity);
    for (int m = 1; m <= params.max_depth; ++m) {
        const auto& parents = tree.levels.back();
        std::vector<RefinementNode> level(parents.size() * n);
        parallel_for(parents.size(), [&](std::size_t p) {
            auto kids = detail::refine_parent(parents[p], params, m);
            for (std::size_t k = 0; k < n; ++k) level[p * n + k] = std::move(kids[k]);
        });
        tree.levels.push_back(std::move(level));
    }
    return tree;
}

/// Walks down from the root choosing the nearest daughter generator; `gen`
/// maps a NodeIndex to its generator. Equidistant points go to the lower index.
template <class GeneratorOf>
NodeIndex descend_nearest(GeneratorOf&& gen, int multiplicity, Point x, int level) {
    NodeIndex id{0, 0};
    for (int m = 1; m <= level; ++m) {
        NodeIndex best = child_of(id, multiplicity, 0);
        const Point g0 = gen(best);
        double best_d2 = dot(x - g0, x - g0);
        for (int k = 1; k < multiplicity; ++k) {
            const NodeIndex c = child_of(id, multiplicity, k);
            const Point g = gen(c);
            const double d2 = dot(x - g, x - g);
            if (d2 < best_d2 * (1.0 - 1e-12)) {
                best_d2 = d2;
                best = c;
            }
        }
        id = best;
    }
    return id;
}

/// Level-`level` node whose cell contains x.
inline NodeIndex locate(const RefinementTree& tree, Point x, int level) {
    if (level < 0 || level > tree.depth()) throw Error(ErrorCode::InvalidArgument, "level outside the tree depth");
    if (!is_finite(x) || !contains_closed(tree.domain, x, tree.domain.eps()))
        throw Error(ErrorCode::PointOutsideDomain, "query point lies outside the domain");
    return descend_nearest([&](NodeIndex id) { return tree.node(id).generator; }, tree.multiplicity(), x, level);
}

} // namespace vgrt
