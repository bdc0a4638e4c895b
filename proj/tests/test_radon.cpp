#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace vgrt;
using support::unit_square;

namespace {

GridSpec grid(int n) { return GridSpec::covering(unit_square().bbox(), n, n); }

} // namespace

TEST(SlabParams, ForcedValues) {
    const RefinementParams p = slab_params(0.4, 6);
    EXPECT_EQ(p.multiplicity, 2);
    EXPECT_EQ(p.dispersion, 0.5);
    EXPECT_EQ(p.rotation_per_level, 0.0);
    EXPECT_EQ(p.base_angle, 0.4);
    EXPECT_EQ(p.max_depth, 6);
}

TEST(RadonSingle, VerticalSlabsAreConstantAlongY) {
    const int depth = 4;
    const Field f = AnalyticField::gaussian_bump({0.4, 0.6}, 0.2);
    const Reconstruction r = radon_reconstruct_single(f, unit_square(), 0.0, depth, grid(32));
    const RefinementTree t = refine(unit_square(), slab_params(0.0, depth));
    EXPECT_EQ(t.levels.back().size(), 16u);
    for (int i = 0; i < 32; ++i) {
        double lo = INFINITY, hi = -INFINITY;
        for (int j = 0; j < 32; ++j) {
            lo = std::min(lo, r.raster.at(i, j));
            hi = std::max(hi, r.raster.at(i, j));
        }
        EXPECT_LT(hi - lo, 1e-12);
    }
}

TEST(RadonSingle, ConstantIsExactAtAnyAngle) {
    const Field f = AnalyticField::constant(0.7);
    for (double angle : {0.0, 0.3, 1.2, 2.9}) {
        const Reconstruction r = radon_reconstruct_single(f, unit_square(), angle, 5, grid(24));
        EXPECT_LT(raster_rmse(r, f), 1e-10);
    }
}

TEST(RadonSingle, LinearErrorBoundedByHalfSlab) {
    const int depth = 5;
    const Field f = AnalyticField::linear(1, 0, 0);
    const Reconstruction r = radon_reconstruct_single(f, unit_square(), 0.0, depth, grid(64));
    const double half_width = 0.5 / std::pow(2.0, depth);
    for (int j = 0; j < 64; ++j)
        for (int i = 0; i < 64; ++i) EXPECT_LE(std::abs(r.raster.at(i, j) - r.raster.pixel_center(i, j).x), half_width + 1e-12);
}

TEST(RadonSingle, RejectsZeroDepth) {
    EXPECT_THROW(radon_reconstruct_single(AnalyticField::constant(1), unit_square(), 0.0, 0, grid(8)), Error);
}

TEST(RadonAverage, SingleAngleMatchesDirectReconstruction) {
    RadonConfig cfg;
    cfg.angles_count = 1;
    cfg.depth = 6;
    cfg.domain = unit_square();
    cfg.field = AnalyticField::product_sine();
    cfg.grid = grid(32);
    const RadonResult r = radon_average(cfg);
    const Reconstruction single = radon_reconstruct_single(cfg.field, cfg.domain, 0.0, 6, cfg.grid);
    EXPECT_EQ(r.averaged.values, single.raster.values);
    EXPECT_EQ(r.per_angle_rmse.size(), 1u);
    EXPECT_EQ(r.averaged_rmse, r.per_angle_rmse[0]);
}

TEST(RadonAverage, IsPointwiseMeanOfSingles) {
    RadonConfig cfg;
    cfg.angles_count = 5;
    cfg.depth = 5;
    cfg.domain = unit_square();
    cfg.field = AnalyticField::gaussian_bump();
    cfg.grid = grid(24);
    const RadonResult r = radon_average(cfg);
    std::vector<double> mean(r.averaged.values.size(), 0.0);
    for (int i = 0; i < 5; ++i) {
        const Reconstruction s =
            radon_reconstruct_single(cfg.field, cfg.domain, std::numbers::pi * i / 5, cfg.depth, cfg.grid);
        EXPECT_NEAR(r.per_angle_rmse[static_cast<std::size_t>(i)], raster_rmse(s, cfg.field), 1e-15);
        for (std::size_t p = 0; p < mean.size(); ++p) mean[p] += s.raster.values[p] / 5;
    }
    for (std::size_t p = 0; p < mean.size(); ++p) EXPECT_NEAR(r.averaged.values[p], mean[p], 1e-12);
}

TEST(RadonAverage, ConstantFieldHasZeroError) {
    RadonConfig cfg;
    cfg.angles_count = 8;
    cfg.depth = 6;
    cfg.domain = unit_square();
    cfg.field = AnalyticField::constant(0.4);
    cfg.grid = grid(32);
    const RadonResult r = radon_average(cfg);
    ASSERT_EQ(r.rmse_vs_k.size(), 4u);
    for (auto [k, e] : r.rmse_vs_k) EXPECT_LT(e, 1e-10) << k;
}

TEST(RadonAverage, CurveDefaultsAndValidation) {
    RadonConfig cfg;
    cfg.angles_count = 6;
    cfg.depth = 3;
    cfg.domain = unit_square();
    cfg.field = AnalyticField::product_sine();
    cfg.grid = grid(16);
    const RadonResult r = radon_average(cfg);
    std::vector<int> ks;
    for (auto [k, e] : r.rmse_vs_k) {
        ks.push_back(k);
        EXPECT_GE(e, 0.0);
    }
    EXPECT_EQ(ks, (std::vector<int>{1, 2, 4, 6}));
    EXPECT_EQ(r.rmse_vs_k.back().second, r.averaged_rmse);
    cfg.angles_count = 0;
    EXPECT_THROW(radon_average(cfg), Error);
}

TEST(RadonAverage, SmoothFieldImprovesOverSingleAngle) {
    RadonConfig cfg;
    cfg.angles_count = 16;
    cfg.depth = 6;
    cfg.domain = unit_square();
    cfg.field = AnalyticField::product_sine();
    cfg.grid = grid(48);
    const RadonResult r = radon_average(cfg);
    EXPECT_LT(r.rmse_vs_k.back().second, r.rmse_vs_k.front().second);
}

TEST(RadonSingle, AnglePeriodicity) {
    const Field f = AnalyticField::gaussian_bump({0.45, 0.55}, 0.2);
    for (double angle : {0.0, 0.4, 1.3}) {
        // Same cells, possibly in a different order.
        const RefinementTree ta = refine(unit_square(), slab_params(angle, 6));
        const RefinementTree tb = refine(unit_square(), slab_params(angle + std::numbers::pi, 6));
        auto key = [](const RefinementNode& n) {
            const Point c = region_centroid(n.region);
            return std::array<double, 3>{std::round(c.x * 1e9), std::round(c.y * 1e9), std::round(n.measure * 1e9)};
        };
        std::vector<std::array<double, 3>> ka, kb;
        for (const auto& n : ta.levels.back()) ka.push_back(key(n));
        for (const auto& n : tb.levels.back()) kb.push_back(key(n));
        std::sort(ka.begin(), ka.end());
        std::sort(kb.begin(), kb.end());
        EXPECT_EQ(ka, kb) << angle;

        // Centers (2i+1)/256 never hit the slab boundaries k/64 at angle 0.
        const double a = raster_rmse(radon_reconstruct_single(f, unit_square(), angle, 6, grid(128)), f);
        const double b = raster_rmse(radon_reconstruct_single(f, unit_square(), angle + std::numbers::pi, 6, grid(128)), f);
        EXPECT_NEAR(a, b, 1e-9) << angle;
    }
}
