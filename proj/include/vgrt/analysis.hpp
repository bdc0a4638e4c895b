#pragma once

// Diagnostics over a coefficient set: measure-weighted frame energy, the
// per-level entropy of the normalized energy distribution, and how far each
// generator sits from the centroid of its own cell.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "field.hpp"
#include "refinement.hpp"
#include "transform.hpp"

namespace vgrt {

struct FrameReport {
    double coefficient_energy = 0.0;            // sum mu |c|^2 over non-root nodes
    double coefficient_energy_with_root = 0.0;  // ... plus mu(Omega) c00^2
    double field_norm_sq = 0.0;                 // integral of f^2
    double total_measure = 0.0;                 // sum of mu over every node, root included
    double normalized_inner = 0.0;              // coefficient_energy_with_root / total_measure
    std::optional<double> ratio;                // with-root energy / ||f||^2; empty for the zero field
    std::optional<double> ratio_excluding_root;
};

inline FrameReport frame_report(const CoefficientSet& coeffs, const Field& field, const Region& domain,
                                const QuadratureSpec& quad = {}) {
    FrameReport r;
    r.coefficient_energy = coefficient_energy(coeffs, false);
    r.coefficient_energy_with_root = coefficient_energy(coeffs, true);
    r.field_norm_sq = l2_norm_sq(field, domain, quad);
    for (const auto& level : coeffs.levels)
        for (const auto& e : level) r.total_measure += e.measure;
    r.normalized_inner = r.total_measure > 0.0 ? r.coefficient_energy_with_root / r.total_measure : 0.0;
    if (r.field_norm_sq > 0.0) {
        r.ratio = r.coefficient_energy_with_root / r.field_norm_sq;
        r.ratio_excluding_root = r.coefficient_energy / r.field_norm_sq;
    }
    return r;
}

struct CorpusEntry {
    std::string name;
    FrameReport report;
};

struct FrameCorpusReport {
    std::vector<CorpusEntry> entries;
    double empirical_A = 0.0;  // smallest with-root ratio over the battery
    double empirical_B = 0.0;  // largest
};

/// Fixed-seed battery of registry fields; `count` fields are drawn cycling
/// through sine, Gaussian bump, linear, checkerboard and mixtures.
inline std::vector<std::pair<std::string, AnalyticField>> corpus_fields(const BoundingBox& box, std::uint64_t seed,
                                                                        int count = 10) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto in_box = [&] {
        return Point{box.lo.x + unit(rng) * box.width(), box.lo.y + unit(rng) * box.height()};
    };
    std::vector<std::pair<std::string, AnalyticField>> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        switch (i % 5) {
        case 0: out.emplace_back("sine", (0.5 + unit(rng)) * AnalyticField::product_sine()); break;
        case 1: {
            const double sigma = 0.05 + 0.25 * unit(rng);
            out.emplace_back("gauss", AnalyticField::gaussian_bump(in_box(), sigma));
            break;
        }
        case 2:
            out.emplace_back("linear", AnalyticField::linear(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0, unit(rng)));
            break;
        case 3: out.emplace_back("checker", AnalyticField::checkerboard(2.0 + static_cast<int>(4.0 * unit(rng)))); break;
        default:
            out.emplace_back("mixture", AnalyticField::product_sine() +
                                            0.5 * AnalyticField::gaussian_bump(in_box(), 0.1 + 0.1 * unit(rng)) +
                                            AnalyticField::constant(unit(rng) - 0.5));
            break;
        }
    }
    return out;
}

inline FrameCorpusReport frame_corpus(const RefinementTree& tree, std::uint64_t seed, const QuadratureSpec& quad = {},
                                      int count = 10) {
    FrameCorpusReport out;
    out.empirical_A = std::numeric_limits<double>::infinity();
    out.empirical_B = 0.0;
    for (auto& [name, f] : corpus_fields(tree.domain.bbox(), seed, count)) {
        const Field field = f;
        FrameReport r = frame_report(forward(tree, field, quad), field, tree.domain, quad);
        if (r.ratio) {
            out.empirical_A = std::min(out.empirical_A, *r.ratio);
            out.empirical_B = std::max(out.empirical_B, *r.ratio);
        }
        out.entries.push_back({name, r});
    }
    if (!std::isfinite(out.empirical_A)) out.empirical_A = 0.0;
    return out;
}

struct EntropyReport {
    int level = 0;
    std::vector<double> probabilities;  // empty when the level carries no energy
    double entropy = 0.0;               // natural log
    double beta = 1.0;
    double partition_value = 0.0;       // sum over p > 0 of exp(-beta * E), E = -log p
    double mean_energy = 0.0;           // sum of p * E
    double level_energy = 0.0;          // sum of mu |c|^2 at this level
    std::size_t nonzero = 0;
};

/// Entropy of the distribution proportional to the given non-negative
/// weighted energies (mu |c|^2 per node).
inline EntropyReport entropy_from_energies(std::span<const double> energies, double beta = 1.0, int level = 0) {
    if (!std::isfinite(beta)) throw Error(ErrorCode::InvalidArgument, "beta must be finite");
    EntropyReport r;
    r.level = level;
    r.beta = beta;
    for (double e : energies) {
        if (!(e >= 0.0) || !std::isfinite(e)) throw Error(ErrorCode::InvalidArgument, "energies must be finite and >= 0");
        r.level_energy += e;
    }
    if (!(r.level_energy > 0.0)) return r;
    r.probabilities.reserve(energies.size());
    for (double e : energies) r.probabilities.push_back(e / r.level_energy);
    for (double p : r.probabilities) {
        if (p <= 0.0) continue;
        const double energy = -std::log(p);
        ++r.nonzero;
        r.entropy -= p * std::log(p);
        r.partition_value += std::exp(-beta * energy);
        r.mean_energy += p * energy;
    }
    return r;
}

inline EntropyReport entropy_report(const CoefficientSet& coeffs, int level, double beta = 1.0) {
    if (level < 1 || level > coeffs.depth()) throw Error(ErrorCode::InvalidArgument, "entropy level must lie in [1, depth]");
    const auto& nodes = coeffs.levels[static_cast<std::size_t>(level)];
    std::vector<double> energies;
    energies.reserve(nodes.size());
    for (const auto& e : nodes) energies.push_back(e.measure * e.coeff * e.coeff);
    return entropy_from_energies(energies, beta, level);
}

inline std::vector<EntropyReport> entropy_spectrum(const CoefficientSet& coeffs, double beta = 1.0) {
    std::vector<EntropyReport> out;
    for (int m = 1; m <= coeffs.depth(); ++m) out.push_back(entropy_report(coeffs, m, beta));
    return out;
}

/// |S - (log Z + beta <E>)|; only meaningful at beta = 1, where Z = sum p = 1.
inline double thermo_identity_residual(const EntropyReport& report) {
    if (report.probabilities.empty()) throw Error(ErrorCode::InvalidArgument, "identity needs a non-empty distribution");
    if (report.beta != 1.0) throw Error(ErrorCode::InvalidArgument, "identity is checked at beta = 1");
    return std::abs(report.entropy - (std::log(report.partition_value) + report.beta * report.mean_energy));
}

struct SymmetryLevel {
    int level = 0;
    std::size_t cells = 0;
    double max_deviation = 0.0;   // |generator - centroid| / cell diameter
    double mean_deviation = 0.0;
};

struct SymmetryReport {
    std::vector<SymmetryLevel> levels;  // one entry per level >= 1
};

inline SymmetryReport symmetry_report(const RefinementTree& tree) {
    SymmetryReport r;
    for (int m = 1; m <= tree.depth(); ++m) {
        const auto& nodes = tree.levels[static_cast<std::size_t>(m)];
        std::vector<double> dev(nodes.size(), -1.0);
        parallel_for(nodes.size(), [&](std::size_t i) {
            if (nodes[i].skipped) return;
            const double diam = region_diameter(nodes[i].region);
            dev[i] = diam > 0.0 ? distance(nodes[i].generator, region_centroid(nodes[i].region)) / diam : 0.0;
        });
        SymmetryLevel s{m, 0, 0.0, 0.0};
        for (double d : dev) {
            if (d < 0.0) continue;
            ++s.cells;
            s.max_deviation = std::max(s.max_deviation, d);
            s.mean_deviation += d;
        }
        if (s.cells > 0) s.mean_deviation /= static_cast<double>(s.cells);
        r.levels.push_back(s);
    }
    return r;
}

struct SquareGridCheck {
    bool ok = true;
    std::string failure;  // first violated condition
};

/// Checks that level m holds 4^m congruent axis-aligned squares of area
/// |Omega| / 4^m for every m, each with its generator at the centroid.
/// Vertex and centroid deviations are measured against `tol` times the
/// domain diameter.
inline SquareGridCheck square_grid_check(const RefinementTree& tree, double tol = 1e-9) {
    SquareGridCheck out;
    auto fail = [&](const std::string& why) {
        if (out.ok) out.failure = why;
        out.ok = false;
    };
    const double scale = tree.domain.bbox().diameter();
    const double total = tree.domain.area();
    for (int m = 0; m <= tree.depth() && out.ok; ++m) {
        const auto& nodes = tree.levels[static_cast<std::size_t>(m)];
        const std::string at = "level " + std::to_string(m);
        if (nodes.size() != nodes_at_level(4, m)) {
            fail(at + ": expected 4^" + std::to_string(m) + " cells, found " + std::to_string(nodes.size()));
            break;
        }
        const double side = std::sqrt(total / static_cast<double>(nodes.size()));
        for (const auto& node : nodes) {
            const std::string cell = at + " cell " + std::to_string(node.id.index);
            if (node.skipped || node.region.pieces().size() != 1) {
                fail(cell + ": not a single polygon");
                break;
            }
            const auto& v = node.region.pieces()[0].vertices;
            const BoundingBox& box = node.region.bbox();
            if (v.size() != 4) {
                fail(cell + ": has " + std::to_string(v.size()) + " vertices");
                break;
            }
            if (std::abs(box.width() - side) > tol * scale || std::abs(box.height() - side) > tol * scale) {
                fail(cell + ": side differs from sqrt(|Omega| / 4^m)");
                break;
            }
            for (Point p : v) {
                const double dx = std::min(std::abs(p.x - box.lo.x), std::abs(p.x - box.hi.x));
                const double dy = std::min(std::abs(p.y - box.lo.y), std::abs(p.y - box.hi.y));
                if (dx > tol * scale || dy > tol * scale) fail(cell + ": not axis-aligned");
            }
            if (std::abs(node.measure - side * side) > tol * total) fail(cell + ": area mismatch");
            if (distance(node.generator, region_centroid(node.region)) > tol * scale)
                fail(cell + ": generator is off the centroid");
            if (!out.ok) break;
        }
    }
    return out;
}

} // namespace vgrt
