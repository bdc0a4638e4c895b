#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"

using namespace vgrt;
using support::l_shape;
using support::unit_square;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::Io;
}

RefinementNode root_node(const Region& r) { return {{0, 0}, region_centroid(r), r, r.area(), false}; }

} // namespace

TEST(Params, Validation) {
    EXPECT_NO_THROW(validate(support::params(2, 0.5, 0, 1)));
    EXPECT_EQ(code_of([] { validate(support::params(1, 0.5, 0, 1)); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { validate(support::params(4, 0.0, 0, 1)); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { validate(support::params(4, 1.0, 0, 1)); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { validate(support::params(4, 1.5, 0, 1)); }), ErrorCode::InvalidArgument);
    RefinementParams p = support::params(4, 0.0, 0, 1);
    p.policy = DegeneracyPolicy::Permissive;
    EXPECT_NO_THROW(validate(p));
    p.dispersion = 1.0;
    EXPECT_NO_THROW(validate(p));
}

TEST(PlaceChildren, WaveletCorners) {
    const auto kids = place_children(root_node(unit_square()), support::wavelet_params(1), 1);
    const std::vector<Point> want{{0.75, 0.75}, {0.25, 0.75}, {0.25, 0.25}, {0.75, 0.25}};
    ASSERT_EQ(kids.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(kids[k].x, want[k].x, 1e-15);
        EXPECT_NEAR(kids[k].y, want[k].y, 1e-15);
    }
}

TEST(PlaceChildren, AxisPair) {
    const auto kids = place_children(root_node(unit_square()), support::params(2, 0.5, 0.0, 1), 1);
    ASSERT_EQ(kids.size(), 2u);
    EXPECT_NEAR(kids[0].x, 0.75, 1e-15);
    EXPECT_NEAR(kids[0].y, 0.5, 1e-15);
    EXPECT_NEAR(kids[1].x, 0.25, 1e-15);
    EXPECT_NEAR(kids[1].y, 0.5, 1e-15);
}

TEST(PlaceChildren, ZeroDispersion) {
    RefinementParams p = support::params(3, 0.0, 0.2, 1);
    p.policy = DegeneracyPolicy::Permissive;
    const RefinementNode root = root_node(l_shape());
    const auto kids = place_children(root, p, 1);
    for (Point k : kids) EXPECT_EQ(k, root.generator);
    p.policy = DegeneracyPolicy::Strict;
    EXPECT_EQ(code_of([&] { place_children(root, p, 1); }), ErrorCode::DegenerateConfiguration);
}

TEST(PlaceChildren, RotationPerLevel) {
    RefinementParams p = support::params(2, 0.5, 0.0, 3);
    p.rotation_per_level = std::numbers::pi / 2;
    const RefinementNode root = root_node(unit_square());
    const auto level1 = place_children(root, p, 1);
    EXPECT_NEAR(level1[0].x, 0.75, 1e-15);
    const auto level2 = place_children(root, p, 2);
    EXPECT_NEAR(level2[0].x, 0.5, 1e-15);
    EXPECT_NEAR(level2[0].y, 0.75, 1e-15);
}

TEST(PlaceChildren, ChildrenStrictlyInside) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(0.05, 0.95), a(0, 6.3);
    const RefinementNode root = root_node(l_shape());
    for (int i = 0; i < 100; ++i) {
        const auto kids = place_children(root, support::params(2 + i % 6, d(rng), a(rng), 1), 1);
        for (Point k : kids) EXPECT_TRUE(strictly_inside(root.region, k));
    }
}

TEST(Refine, WaveletDepthTwo) {
    const RefinementTree t = refine(unit_square(), support::wavelet_params(2));
    ASSERT_EQ(t.levels.size(), 3u);
    EXPECT_EQ(t.levels[0].size() + t.levels[1].size() + t.levels[2].size(), 1u + 4u + 16u);
    for (const auto& n : t.levels[2]) {
        EXPECT_NEAR(n.region.bbox().width(), 0.25, 1e-12);
        EXPECT_NEAR(n.region.bbox().height(), 0.25, 1e-12);
        EXPECT_NEAR(n.measure, 1.0 / 16, 1e-15);
    }
}

TEST(Refine, SlabsAtDepthThree) {
    const RefinementTree t = refine(unit_square(), support::params(2, 0.5, 0.0, 3));
    ASSERT_EQ(t.levels[3].size(), 8u);
    std::vector<double> lefts;
    for (const auto& n : t.levels[3]) {
        EXPECT_NEAR(polygon_area(n.region.pieces()[0]), 1.0 / 8, 1e-15);
        EXPECT_NEAR(n.region.bbox().width(), 1.0 / 8, 1e-15);
        EXPECT_NEAR(n.region.bbox().height(), 1.0, 1e-15);
        lefts.push_back(n.region.bbox().lo.x);
    }
    std::sort(lefts.begin(), lefts.end());
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(lefts[i], static_cast<double>(i) / 8, 1e-15);
}

TEST(Refine, DepthZero) {
    const RefinementTree t = refine(l_shape(), support::params(3, 0.5, 0.0, 0));
    ASSERT_EQ(t.levels.size(), 1u);
    EXPECT_DOUBLE_EQ(t.root().measure, 3.0);
    EXPECT_NEAR(t.root().generator.x, 5.0 / 6, 1e-14);
}

TEST(Refine, RootOverride) {
    RefinementParams p = support::params(3, 0.5, 0.0, 1);
    p.root_generator = Point{0.2, 0.2};
    EXPECT_EQ(refine(unit_square(), p).root().generator, (Point{0.2, 0.2}));
    p.root_generator = Point{1.5, 1.5};
    EXPECT_EQ(code_of([&] { refine(l_shape(), p); }), ErrorCode::GeneratorOutsideParent);
}

TEST(Refine, MinCellAreaPolicies) {
    RefinementParams p = support::params(4, 0.5, std::numbers::pi / 4, 3);
    p.min_cell_area = 0.02;  // level-2 cells have area 1/16, level-3 cells 1/64
    EXPECT_EQ(code_of([&] { refine(unit_square(), p); }), ErrorCode::EmptyCell);
    p.policy = DegeneracyPolicy::Permissive;
    const RefinementTree t = refine(unit_square(), p);
    ASSERT_EQ(t.levels[3].size(), 64u);
    for (const auto& n : t.levels[3]) EXPECT_TRUE(n.skipped);
    for (const auto& n : t.levels[2]) EXPECT_FALSE(n.skipped);
}

TEST(Refine, PermissiveZeroDispersionKeepsClosure) {
    RefinementParams p = support::params(3, 0.0, 0.0, 2);
    p.policy = DegeneracyPolicy::Permissive;
    const RefinementTree t = refine(unit_square(), p);
    for (const auto& level : t.levels) {
        double sum = 0.0;
        for (const auto& n : level)
            if (!n.skipped) sum += n.measure;
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(Refine, ClosureProperty) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> n_dist(2, 7);
    std::uniform_real_distribution<double> d_dist(0.2, 0.8), a_dist(0, 2 * std::numbers::pi);
    for (const Region& domain : {unit_square(), l_shape()}) {
        for (int draw = 0; draw < 6; ++draw) {
            const int n = n_dist(rng);
            const RefinementTree t = refine(domain, support::params(n, d_dist(rng), a_dist(rng), 3));
            for (std::size_t m = 0; m < t.levels.size(); ++m) {
                double sum = 0.0;
                for (const auto& node : t.levels[m]) sum += node.measure;
                EXPECT_NEAR(sum, domain.area(), 1e-9 * domain.area());
                if (m == 0) continue;
                for (std::size_t p = 0; p < t.levels[m - 1].size(); ++p) {
                    double kids = 0.0;
                    for (int k = 0; k < n; ++k) kids += t.levels[m][p * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)].measure;
                    EXPECT_NEAR(kids, t.levels[m - 1][p].measure, 1e-9 * t.levels[m - 1][p].measure);
                }
            }
        }
    }
}

TEST(Refine, GeneratorsInsideTheirCells) {
    const RefinementTree t = refine(l_shape(), support::params(5, 0.6, 0.4, 3));
    for (const auto& level : t.levels)
        for (const auto& n : level) EXPECT_TRUE(contains_closed(n.region, n.generator, 1e-12));
}

TEST(Refine, NestingProperty) {
    const RefinementTree t = refine(l_shape(), support::params(3, 0.45, 1.1, 3));
    std::mt19937_64 rng(17);
    const std::size_t n = 3;
    for (std::size_t m = 1; m < t.levels.size(); ++m) {
        for (std::size_t i = 0; i < t.levels[m].size(); i += 7) {
            const auto& child = t.levels[m][i];
            const auto& parent = t.levels[m - 1][i / n];
            const auto child_rings = support::rings(child.region);
            const auto parent_rings = support::rings(parent.region);
            const BoundingBox b = child.region.bbox();
            std::uniform_real_distribution<double> ux(b.lo.x, b.hi.x), uy(b.lo.y, b.hi.y);
            int accepted = 0;
            while (accepted < 1000) {
                const double x = ux(rng), y = uy(rng);
                if (!oracle::in_rings(child_rings, x, y)) continue;
                ++accepted;
                EXPECT_TRUE(oracle::in_rings(parent_rings, x, y) ||
                            oracle::distance_to_boundary(parent_rings, {x, y}) < 1e-9);
            }
        }
    }
}

TEST(Refine, RotationEquivariance) {
    // Regular 360-gon stands in for a disk; rotating by a multiple of its
    // vertex spacing maps the domain onto itself.
    std::vector<Point> ring;
    for (int i = 0; i < 360; ++i) ring.push_back(unit_vector(2 * std::numbers::pi * i / 360));
    const Region disk(make_polygon(ring));
    const Point c = region_centroid(disk);
    for (int steps : {7, 45, 100}) {
        const double phi = 2 * std::numbers::pi * steps / 360;
        const RefinementTree a = refine(disk, support::params(5, 0.5, 0.3, 1));
        const RefinementTree b = refine(disk, support::params(5, 0.5, 0.3 + phi, 1));
        for (std::size_t k = 0; k < 5; ++k) {
            const Point g = a.levels[1][k].generator - c;
            const Point rotated{c.x + std::cos(phi) * g.x - std::sin(phi) * g.y,
                                c.y + std::sin(phi) * g.x + std::cos(phi) * g.y};
            EXPECT_LT(distance(rotated, b.levels[1][k].generator), 1e-9);
        }
    }
}

TEST(Refine, DeterministicAcrossThreadCounts) {
    set_thread_count(1);
    const RefinementTree a = refine(l_shape(), support::params(4, 0.5, 0.2, 3));
    set_thread_count(8);
    const RefinementTree b = refine(l_shape(), support::params(4, 0.5, 0.2, 3));
    set_thread_count(1);
    EXPECT_EQ(io::tree_json(a), io::tree_json(b));
}

TEST(ParentOf, Examples) {
    EXPECT_EQ(parent_of({2, 7}, 4), (NodeIndex{1, 1}));
    EXPECT_EQ(parent_of({1, 0}, 5), (NodeIndex{0, 0}));
    EXPECT_EQ(parent_of({3, 25}, 3), (NodeIndex{2, 8}));
    EXPECT_EQ(code_of([] { parent_of({0, 0}, 4); }), ErrorCode::RootHasNoParent);
}

TEST(IndexAlgebra, Properties) {
    std::mt19937_64 rng(23);
    for (int n = 2; n <= 7; ++n) {
        for (int trial = 0; trial < 200; ++trial) {
            const int level = static_cast<int>(rng() % 6);
            const std::uint64_t index = rng() % nodes_at_level(n, level);
            const NodeIndex id{level, index};
            for (int k = 0; k < n; ++k) EXPECT_EQ(parent_of(child_of(id, n, k), n), id);
            // Walk up a random number of levels and compare to the floor formula.
            NodeIndex anc = id;
            const int up = static_cast<int>(rng() % static_cast<std::uint64_t>(level + 1));
            for (int s = 0; s < up; ++s) anc = parent_of(anc, n);
            std::uint64_t pow = 1;
            for (int s = 0; s < up; ++s) pow *= static_cast<std::uint64_t>(n);
            EXPECT_EQ(anc.index, index / pow);
            EXPECT_EQ(is_descendant(id, anc, n), up > 0);
        }
    }
}

TEST(Locate, WaveletQuadrant) {
    const RefinementTree t = refine(unit_square(), support::wavelet_params(2));
    const NodeIndex id = locate(t, {0.9, 0.9}, 1);
    EXPECT_EQ(id, (NodeIndex{1, 0}));
    EXPECT_EQ(t.node(id).generator, (Point{0.75, 0.75}));
}

TEST(Locate, TieGoesToLowerIndex) {
    const RefinementTree t = refine(unit_square(), support::params(2, 0.5, 0.0, 1));
    // Cell 0 is the right half, cell 1 the left; both contain x = 0.5.
    EXPECT_EQ(locate(t, {0.5, 0.3}, 1), (NodeIndex{1, 0}));
    const RefinementTree flipped = refine(unit_square(), support::params(2, 0.5, std::numbers::pi, 1));
    EXPECT_EQ(locate(flipped, {0.5, 0.3}, 1), (NodeIndex{1, 0}));
}

TEST(Locate, AgreesWithBruteForceScan) {
    const RefinementTree t = refine(l_shape(), support::params(3, 0.55, 0.7, 4));
    const auto domain_rings = support::rings(t.domain);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0, 2);
    int tested = 0;
    while (tested < 500) {
        const double x = u(rng), y = u(rng);
        if (!oracle::in_rings(domain_rings, x, y)) continue;
        ++tested;
        for (int m = 0; m <= t.depth(); ++m) {
            const NodeIndex id = locate(t, {x, y}, m);
            std::vector<std::uint64_t> hits;
            const auto& level = t.levels[static_cast<std::size_t>(m)];
            for (const auto& n : level)
                if (oracle::in_rings(support::rings(n.region), x, y)) hits.push_back(n.id.index);
            ASSERT_FALSE(hits.empty());
            if (hits.size() == 1) {
                EXPECT_EQ(id.index, hits[0]);
            }
            EXPECT_TRUE(contains_closed(t.node(id).region, {x, y}, 1e-9));
        }
    }
}

TEST(Locate, Errors) {
    const RefinementTree t = refine(l_shape(), support::params(3, 0.5, 0.0, 2));
    EXPECT_EQ(code_of([&] { locate(t, {1.5, 1.5}, 1); }), ErrorCode::PointOutsideDomain);
    EXPECT_EQ(code_of([&] { locate(t, {0.5, 0.5}, 3); }), ErrorCode::InvalidArgument);
}
