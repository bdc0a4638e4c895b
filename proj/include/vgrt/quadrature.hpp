#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"

namespace vgrt {

/// n-point Gauss-Legendre rule mapped to [0, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// P_n(x) and P_n'(x) by the three-term recurrence.
inline std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

inline GaussLegendre compute_gauss_legendre(int n) {
    GaussLegendre rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(n, x).second;
        rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
        rule.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

} // namespace detail

inline const GaussLegendre& gauss_legendre(int n) {
    if (n < 1 || n > 256) throw Error(ErrorCode::InvalidArgument, "Gauss order must lie in [1, 256]");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussLegendre>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussLegendre>(detail::compute_gauss_legendre(n));
    return *slot;
}

/// Integral over a triangle with the collapsed (Duffy) tensor Gauss rule of
/// `order` points per axis; exact for polynomials of degree <= 2*order - 2.
template <class F>
double integrate_triangle(const Triangle& tri, F&& f, int order) {
    const GaussLegendre& gl = gauss_legendre(order);
    const Point a = tri[0], ab = tri[1] - tri[0], ac = tri[2] - tri[0];
    const double jac = std::abs(cross(ab, ac));
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double u = gl.nodes[i];
        double row = 0.0;
        for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
            const double v = gl.nodes[j] * (1.0 - u);
            row += gl.weights[j] * f(a + u * ab + v * ac);
        }
        acc += gl.weights[i] * (1.0 - u) * row;
    }
    return jac * acc;
}

/// Splits into four congruent sub-triangles while the split estimate
/// disagrees with the coarse one by more than `tol` times the triangle area.
template <class F>
double integrate_triangle_adaptive(const Triangle& tri, F&& f, int order, double tol, int max_levels) {
    const double coarse = integrate_triangle(tri, f, order);
    if (max_levels <= 0) return coarse;
    const Point m01 = 0.5 * (tri[0] + tri[1]), m12 = 0.5 * (tri[1] + tri[2]), m20 = 0.5 * (tri[2] + tri[0]);
    const Triangle sub[4] = {{tri[0], m01, m20}, {m01, tri[1], m12}, {m20, m12, tri[2]}, {m01, m12, m20}};
    double fine = 0.0;
    for (const auto& s : sub) fine += integrate_triangle(s, f, order);
    const double area = 0.5 * std::abs(cross(tri[1] - tri[0], tri[2] - tri[0]));
    if (std::abs(fine - coarse) <= tol * area) return fine;
    double refined = 0.0;
    for (const auto& s : sub) refined += integrate_triangle_adaptive(s, f, order, tol, max_levels - 1);
    return refined;
}

} // namespace vgrt
