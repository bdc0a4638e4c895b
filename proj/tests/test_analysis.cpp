#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"

using namespace vgrt;
using support::l_shape;
using support::unit_square;

namespace {

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

} // namespace

TEST(FrameReport, ConstantField) {
    const RefinementTree t = refine(l_shape(), support::params(4, 0.5, 0.3, 3));
    const Field f = AnalyticField::constant(1.5);
    const FrameReport r = frame_report(forward(t, f), f, t.domain);
    EXPECT_LT(r.coefficient_energy, 1e-20);
    ASSERT_TRUE(r.ratio.has_value());
    EXPECT_NEAR(*r.ratio, 1.0, 1e-12);
}

TEST(FrameReport, ZeroFieldHasNoRatio) {
    const RefinementTree t = refine(unit_square(), support::wavelet_params(2));
    const Field f = AnalyticField::constant(0.0);
    const FrameReport r = frame_report(forward(t, f), f, t.domain);
    EXPECT_FALSE(r.ratio.has_value());
    EXPECT_FALSE(r.ratio_excluding_root.has_value());
}

TEST(FrameReport, SineRatioGrowsWithDepth) {
    const Field f = AnalyticField::product_sine();
    double prev = 0.0;
    for (int depth = 1; depth <= 5; ++depth) {
        const RefinementTree t = refine(unit_square(), support::wavelet_params(depth));
        const CoefficientSet c = forward(t, f);
        const FrameReport r = frame_report(c, f, t.domain);
        ASSERT_TRUE(r.ratio.has_value());
        EXPECT_GT(*r.ratio, prev);
        EXPECT_LE(*r.ratio, 1.0);
        EXPECT_NEAR(*r.ratio, partial_norm_sq(c, depth) / oracle::rect_integral_sine_sq(0, 1, 0, 1), 1e-8);
        // Levels 0..depth each cover the square once.
        EXPECT_NEAR(r.total_measure, depth + 1.0, 1e-12);
        EXPECT_NEAR(r.normalized_inner, r.coefficient_energy_with_root / r.total_measure, 1e-15);
        prev = *r.ratio;
    }
    EXPECT_GT(prev, 0.99);
}

TEST(FrameReport, CorpusBounds) {
    const RefinementTree t = refine(unit_square(), support::wavelet_params(4));
    const FrameCorpusReport c = frame_corpus(t, 42);
    ASSERT_EQ(c.entries.size(), 10u);
    EXPECT_GT(c.empirical_A, 0.0);
    EXPECT_LE(c.empirical_A, c.empirical_B);
    EXPECT_TRUE(std::isfinite(c.empirical_B));
    for (const auto& e : c.entries) {
        ASSERT_TRUE(e.report.ratio.has_value());
        EXPECT_GE(*e.report.ratio, c.empirical_A);
        EXPECT_LE(*e.report.ratio, c.empirical_B);
        EXPECT_GE(e.report.coefficient_energy, 0.0);
    }
    const FrameCorpusReport again = frame_corpus(t, 42);
    EXPECT_EQ(again.empirical_A, c.empirical_A);
    EXPECT_EQ(again.empirical_B, c.empirical_B);
}

TEST(Entropy, Examples) {
    for (int n : {1, 2, 5, 64}) {
        const std::vector<double> e(static_cast<std::size_t>(n), 0.3);
        EXPECT_NEAR(entropy_from_energies(e).entropy, std::log(n), 1e-12);
    }
    EXPECT_EQ(entropy_from_energies(std::vector<double>{0, 0, 2.0, 0}).entropy, 0.0);
    EXPECT_NEAR(entropy_from_energies(std::vector<double>{2, 1, 1}).entropy, 1.5 * std::log(2.0), 1e-15);
}

TEST(Entropy, ZeroEnergyLevel) {
    const EntropyReport r = entropy_from_energies(std::vector<double>{0, 0, 0});
    EXPECT_TRUE(r.probabilities.empty());
    EXPECT_EQ(r.entropy, 0.0);
    EXPECT_EQ(r.nonzero, 0u);
    EXPECT_THROW(thermo_identity_residual(r), Error);
}

TEST(Entropy, RejectsNegativeEnergy) {
    EXPECT_THROW(entropy_from_energies(std::vector<double>{1, -1}), Error);
}

TEST(ThermoIdentity, Examples) {
    EXPECT_LT(thermo_identity_residual(entropy_from_energies(std::vector<double>{1, 1, 1, 1})), 1e-12);
    EXPECT_LT(thermo_identity_residual(entropy_from_energies(std::vector<double>{0, 3, 0})), 1e-12);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> e(50);
    for (double& x : e) x = u(rng);
    EXPECT_LT(thermo_identity_residual(entropy_from_energies(e)), 1e-10);
    EXPECT_THROW(thermo_identity_residual(entropy_from_energies(e, 2.0)), Error);
}

TEST(Entropy, PartitionFunctionAtOtherBeta) {
    // With E = -log p, Z(beta) = sum p^beta.
    const std::vector<double> e{4, 3, 2, 1};
    const EntropyReport r = entropy_from_energies(e, 2.0);
    double want = 0.0;
    for (double x : e) want += std::pow(x / 10.0, 2.0);
    EXPECT_NEAR(r.partition_value, want, 1e-15);
}

TEST(Entropy, BoundsOnRealCoefficients) {
    for (const Region& d : {unit_square(), l_shape()}) {
        const RefinementTree t = refine(d, support::params(4, 0.5, 0.3, 4));
        const CoefficientSet c = forward(t, AnalyticField::gaussian_bump({0.6, 0.7}, 0.2));
        for (const auto& r : entropy_spectrum(c)) {
            ASSERT_FALSE(r.probabilities.empty());
            EXPECT_NEAR(sum(r.probabilities), 1.0, 1e-12);
            EXPECT_GE(r.entropy, 0.0);
            EXPECT_LE(r.entropy, std::log(static_cast<double>(r.nonzero)) + 1e-12);
            EXPECT_LT(thermo_identity_residual(r), 1e-10);
        }
    }
}

TEST(Entropy, ScaleCovariance) {
    const RefinementTree t = refine(l_shape(), support::params(3, 0.5, 0.3, 3));
    const Field f = AnalyticField::product_sine() + AnalyticField::linear(0.2, 0.1, 0);
    const Field g = -3.5 * (AnalyticField::product_sine() + AnalyticField::linear(0.2, 0.1, 0));
    const CoefficientSet cf = forward(t, f), cg = forward(t, g);
    EXPECT_NEAR(coefficient_energy(cg, false), 3.5 * 3.5 * coefficient_energy(cf, false),
                1e-10 * coefficient_energy(cg, false));
    const auto sf = entropy_spectrum(cf), sg = entropy_spectrum(cg);
    for (std::size_t m = 0; m < sf.size(); ++m) {
        EXPECT_NEAR(sf[m].entropy, sg[m].entropy, 1e-10);
        for (std::size_t i = 0; i < sf[m].probabilities.size(); ++i)
            EXPECT_NEAR(sf[m].probabilities[i], sg[m].probabilities[i], 1e-10);
    }
}

TEST(Entropy, LevelOutOfRange) {
    const RefinementTree t = refine(unit_square(), support::wavelet_params(2));
    const CoefficientSet c = forward(t, AnalyticField::product_sine());
    EXPECT_THROW(entropy_report(c, 0), Error);
    EXPECT_THROW(entropy_report(c, 3), Error);
}

TEST(Symmetry, WaveletIsCentroidal) {
    const SymmetryReport r = symmetry_report(refine(unit_square(), support::wavelet_params(4)));
    ASSERT_EQ(r.levels.size(), 4u);
    for (const auto& s : r.levels) EXPECT_LT(s.max_deviation, 1e-9);
}

TEST(Symmetry, OffCentroidConfiguration) {
    const SymmetryReport r = symmetry_report(refine(unit_square(), support::params(3, 0.3, 0.0, 2)));
    ASSERT_EQ(r.levels.size(), 2u);
    for (const auto& s : r.levels) {
        EXPECT_GT(s.max_deviation, 1e-3);
        EXPECT_GE(s.mean_deviation, 0.0);
        EXPECT_LE(s.mean_deviation, s.max_deviation);
    }
}

TEST(Symmetry, DepthZeroIsEmpty) {
    EXPECT_TRUE(symmetry_report(refine(unit_square(), support::wavelet_params(0))).levels.empty());
}

TEST(SquareGridCheck, PassesAndFails) {
    EXPECT_TRUE(square_grid_check(refine(unit_square(), support::wavelet_params(4))).ok);
    const SquareGridCheck bad = square_grid_check(refine(unit_square(), support::params(4, 0.5, 0.3, 2)));
    EXPECT_FALSE(bad.ok);
    EXPECT_FALSE(bad.failure.empty());
}
