#pragma once

// Function sources and region averages (1/|R|) * integral of f over R.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"
#include "refinement.hpp"

namespace vgrt {

/// Square-pixel raster. Pixel (i, j) has its center at
/// origin + ((i + 0.5) * pixel_size, (j + 0.5) * pixel_size); row j = 0 is
/// the bottom row and values are stored row-major.
struct RasterField {
    int width = 0;
    int height = 0;
    Point origin{};
    double pixel_size = 1.0;
    std::vector<double> values;

    static RasterField zeros(int width, int height, Point origin, double pixel_size) {
        if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "raster size must be positive");
        if (!(pixel_size > 0.0)) throw Error(ErrorCode::InvalidArgument, "pixel size must be positive");
        return {width, height, origin, pixel_size,
                std::vector<double>(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0)};
    }

    double& at(int i, int j) { return values[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) + static_cast<std::size_t>(i)]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) + static_cast<std::size_t>(i)]; }

    Point pixel_center(int i, int j) const {
        return origin + Point{(i + 0.5) * pixel_size, (j + 0.5) * pixel_size};
    }

    BoundingBox extent() const {
        BoundingBox b;
        b.expand(origin);
        b.expand(origin + Point{width * pixel_size, height * pixel_size});
        return b;
    }

    /// Value of the pixel containing p (clamped to the raster).
    double evaluate(Point p) const {
        const int i = std::clamp(static_cast<int>(std::floor((p.x - origin.x) / pixel_size)), 0, width - 1);
        const int j = std::clamp(static_cast<int>(std::floor((p.y - origin.y) / pixel_size)), 0, height - 1);
        return at(i, j);
    }

    void validate() const {
        if (width <= 0 || height <= 0 || !(pixel_size > 0.0))
            throw Error(ErrorCode::InvalidArgument, "raster size and pixel size must be positive");
        if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
            throw Error(ErrorCode::InvalidArgument, "raster value count does not match its size");
        for (double v : values)
            if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "raster value is not finite");
    }
};

/// Built-in test functions and their linear combinations.
class AnalyticField {
public:
    enum class Kind { Constant, Linear, ProductSine, GaussianBump, Checkerboard };

    struct Term {
        Kind kind;
        double weight;
        std::array<double, 3> p;
    };

    static AnalyticField constant(double c) { return AnalyticField({{Kind::Constant, c, {0, 0, 0}}}); }
    /// a*x + b*y + c
    static AnalyticField linear(double a, double b, double c) { return AnalyticField({{Kind::Linear, 1.0, {a, b, c}}}); }
    /// sin(pi x) sin(pi y)
    static AnalyticField product_sine() { return AnalyticField({{Kind::ProductSine, 1.0, {0, 0, 0}}}); }
    /// exp(-|x - center|^2 / (2 sigma^2))
    static AnalyticField gaussian_bump(Point center = {0.5, 0.5}, double sigma = 0.15) {
        if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "Gaussian sigma must be positive");
        return AnalyticField({{Kind::GaussianBump, 1.0, {center.x, center.y, sigma}}});
    }
    /// 1 on squares of side 1/cells_per_unit where floor(kx)+floor(ky) is odd, else 0.
    static AnalyticField checkerboard(double cells_per_unit = 4.0) {
        if (!(cells_per_unit > 0.0)) throw Error(ErrorCode::InvalidArgument, "checkerboard frequency must be positive");
        return AnalyticField({{Kind::Checkerboard, 1.0, {cells_per_unit, 0, 0}}});
    }

    /// Parses "NAME[:p1,p2,...]": const:c, linear:a,b,c, sine, gauss:cx,cy,sigma, checker:k.
    static AnalyticField parse(const std::string& text) {
        const auto colon = text.find(':');
        const std::string name = text.substr(0, colon);
        std::vector<double> args;
        if (colon != std::string::npos) {
            std::stringstream ss(text.substr(colon + 1));
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                try {
                    std::size_t used = 0;
                    args.push_back(std::stod(tok, &used));
                    if (used != tok.size()) throw std::invalid_argument(tok);
                } catch (const std::exception&) {
                    throw Error(ErrorCode::InvalidArgument, "bad numeric parameter '" + tok + "' in field '" + text + "'");
                }
            }
        }
        auto arg = [&](std::size_t i, double fallback) { return i < args.size() ? args[i] : fallback; };
        auto expect_at_most = [&](std::size_t n) {
            if (args.size() > n) throw Error(ErrorCode::InvalidArgument, "too many parameters for field '" + name + "'");
        };
        if (name == "const" || name == "constant") {
            expect_at_most(1);
            return constant(arg(0, 1.0));
        }
        if (name == "linear") {
            expect_at_most(3);
            return linear(arg(0, 1.0), arg(1, 0.0), arg(2, 0.0));
        }
        if (name == "sine") {
            expect_at_most(0);
            return product_sine();
        }
        if (name == "gauss") {
            expect_at_most(3);
            return gaussian_bump({arg(0, 0.5), arg(1, 0.5)}, arg(2, 0.15));
        }
        if (name == "checker") {
            expect_at_most(1);
            return checkerboard(arg(0, 4.0));
        }
        throw Error(ErrorCode::InvalidArgument, "unknown field '" + name + "' (const, linear, sine, gauss, checker)");
    }

    double operator()(Point x) const {
        double acc = 0.0;
        for (const Term& t : terms_) acc += t.weight * eval_term(t, x);
        return acc;
    }

    const std::vector<Term>& terms() const { return terms_; }

    friend AnalyticField operator+(AnalyticField a, const AnalyticField& b) {
        a.terms_.reserve(a.terms_.size() + b.terms_.size());
        for (const Term& t : b.terms_) a.terms_.push_back(t);
        return a;
    }
    friend AnalyticField operator*(double s, AnalyticField a) {
        for (auto& t : a.terms_) t.weight *= s;
        return a;
    }

private:
    explicit AnalyticField(std::vector<Term> terms) : terms_(std::move(terms)) {}

    static double eval_term(const Term& t, Point x) {
        switch (t.kind) {
        case Kind::Constant: return 1.0;
        case Kind::Linear: return t.p[0] * x.x + t.p[1] * x.y + t.p[2];
        case Kind::ProductSine: return std::sin(std::numbers::pi * x.x) * std::sin(std::numbers::pi * x.y);
        case Kind::GaussianBump: {
            const double dx = x.x - t.p[0], dy = x.y - t.p[1];
            return std::exp(-(dx * dx + dy * dy) / (2.0 * t.p[2] * t.p[2]));
        }
        case Kind::Checkerboard: {
            const auto cx = static_cast<std::int64_t>(std::floor(x.x * t.p[0]));
            const auto cy = static_cast<std::int64_t>(std::floor(x.y * t.p[0]));
            return ((cx + cy) % 2 != 0) ? 1.0 : 0.0;
        }
        }
        return 0.0;
    }

    std::vector<Term> terms_;
};

/// Function that is constant on each deepest-level cell of a refinement tree.
/// Carries the generators of every level so it can locate points on its own.
struct CellField {
    int multiplicity = 2;
    int depth = 0;
    Region domain;
    std::vector<std::vector<Point>> generators;  // per level, by index
    std::vector<double> leaf_measures;
    std::vector<double> leaf_values;

    static CellField on_tree(const RefinementTree& tree, std::vector<double> leaf_values) {
        CellField f;
        f.multiplicity = tree.multiplicity();
        f.depth = tree.depth();
        f.domain = tree.domain;
        for (const auto& level : tree.levels) {
            std::vector<Point> g;
            g.reserve(level.size());
            for (const auto& node : level) g.push_back(node.generator);
            f.generators.push_back(std::move(g));
        }
        for (const auto& leaf : tree.levels.back()) f.leaf_measures.push_back(leaf.measure);
        if (leaf_values.size() != f.leaf_measures.size())
            throw Error(ErrorCode::InvalidArgument, "leaf value count does not match the tree");
        f.leaf_values = std::move(leaf_values);
        return f;
    }

    /// True when the leaf layout matches `tree` (same shape and generators).
    bool matches(const RefinementTree& tree) const {
        if (tree.multiplicity() != multiplicity || tree.depth() != depth) return false;
        for (std::size_t m = 0; m < tree.levels.size(); ++m)
            for (std::size_t i = 0; i < tree.levels[m].size(); ++i)
                if (!(tree.levels[m][i].generator == generators[m][i])) return false;
        return true;
    }

    double operator()(Point x) const {
        const NodeIndex leaf = descend_nearest(
            [&](NodeIndex id) { return generators[static_cast<std::size_t>(id.level)][static_cast<std::size_t>(id.index)]; },
            multiplicity, x, depth);
        return leaf_values[static_cast<std::size_t>(leaf.index)];
    }
};

using Field = std::variant<RasterField, AnalyticField, CellField>;

struct QuadratureSpec {
    enum class Method { PixelCenter, TriangulatedGauss };
    Method method = Method::TriangulatedGauss;
    int order = 7;               // Gauss points per axis, or samples per axis for PixelCenter on analytic fields
    double tolerance = 1e-10;    // per-area acceptance for adaptive triangle splitting
    int max_subdivisions = 6;    // adaptive triangle splitting depth; 0 = fixed rule

    static QuadratureSpec gauss(int order = 7, int max_subdivisions = 6) {
        return {Method::TriangulatedGauss, order, 1e-10, max_subdivisions};
    }
    static QuadratureSpec pixel(int samples_per_axis = 64) { return {Method::PixelCenter, samples_per_axis, 1e-10, 0}; }

    void validate() const {
        if (order < 1) throw Error(ErrorCode::InvalidArgument, "quadrature order must be positive");
        if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "quadrature tolerance must be positive");
        if (max_subdivisions < 0) throw Error(ErrorCode::InvalidArgument, "subdivision depth must be >= 0");
    }
};

inline double evaluate(const Field& field, Point x) {
    return std::visit([&](const auto& f) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, RasterField>) return f.evaluate(x);
        else return f(x);
    }, field);
}

namespace detail {

inline void require_area(const Region& region) {
    if (region.empty() || !(region.area() > 0.0)) throw Error(ErrorCode::DegenerateGeometry, "region has no area");
}

struct SampleSum {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;
};

// Calls fn(i, j) for every pixel whose center falls inside the region.
template <class Fn>
void for_each_pixel_in(const RasterField& raster, const Region& region, Fn&& fn) {
    const BoundingBox ext = raster.extent();
    const BoundingBox& box = region.bbox();
    const double slack = 1e-9 * std::max(ext.diameter(), 1.0);
    if (box.lo.x < ext.lo.x - slack || box.lo.y < ext.lo.y - slack || box.hi.x > ext.hi.x + slack ||
        box.hi.y > ext.hi.y + slack)
        throw Error(ErrorCode::InvalidArgument, "region extends beyond the raster");
    const double ps = raster.pixel_size;
    const int i0 = std::max(0, static_cast<int>(std::floor((box.lo.x - raster.origin.x) / ps - 0.5)));
    const int i1 = std::min(raster.width - 1, static_cast<int>(std::ceil((box.hi.x - raster.origin.x) / ps - 0.5)));
    const int j0 = std::max(0, static_cast<int>(std::floor((box.lo.y - raster.origin.y) / ps - 0.5)));
    const int j1 = std::min(raster.height - 1, static_cast<int>(std::ceil((box.hi.y - raster.origin.y) / ps - 0.5)));
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
            if (contains(region, raster.pixel_center(i, j))) fn(i, j);
}

inline SampleSum raster_samples(const RasterField& raster, const Region& region) {
    SampleSum s;
    for_each_pixel_in(raster, region, [&](int i, int j) {
        const double v = raster.at(i, j);
        s.sum += v;
        s.sum_sq += v * v;
        ++s.count;
    });
    return s;
}

template <class F>
SampleSum grid_samples(F&& f, const Region& region, int per_axis) {
    const BoundingBox& box = region.bbox();
    SampleSum s;
    for (int j = 0; j < per_axis; ++j)
        for (int i = 0; i < per_axis; ++i) {
            const Point p{box.lo.x + (i + 0.5) * box.width() / per_axis, box.lo.y + (j + 0.5) * box.height() / per_axis};
            if (!contains(region, p)) continue;
            const double v = f(p);
            s.sum += v;
            s.sum_sq += v * v;
            ++s.count;
        }
    return s;
}

template <class F>
double gauss_integral(F&& f, const Region& region, const QuadratureSpec& quad) {
    double acc = 0.0;
    for (const auto& piece : region.pieces())
        for (const Triangle& tri : triangulate(piece))
            acc += quad.max_subdivisions > 0
                       ? integrate_triangle_adaptive(tri, f, quad.order, quad.tolerance, quad.max_subdivisions)
                       : integrate_triangle(tri, f, quad.order);
    return acc;
}

} // namespace detail

/// Mean of f over the region. Rasters use the pixel centers inside the
/// region; analytic and cell fields use the configured quadrature.
inline double average(const Field& field, const Region& region, const QuadratureSpec& quad = {}) {
    quad.validate();
    detail::require_area(region);
    if (const auto* raster = std::get_if<RasterField>(&field)) {
        const auto s = detail::raster_samples(*raster, region);
        if (s.count == 0) throw Error(ErrorCode::EmptyQuadrature, "no pixel center falls inside the region");
        return s.sum / static_cast<double>(s.count);
    }
    auto f = [&](Point x) { return evaluate(field, x); };
    if (quad.method == QuadratureSpec::Method::PixelCenter) {
        const auto s = detail::grid_samples(f, region, quad.order);
        if (s.count == 0) throw Error(ErrorCode::EmptyQuadrature, "no sample point falls inside the region");
        return s.sum / static_cast<double>(s.count);
    }
    return detail::gauss_integral(f, region, quad) / region.area();
}

/// Integral of f^2 over the domain (unnormalized).
inline double l2_norm_sq(const Field& field, const Region& domain, const QuadratureSpec& quad = {}) {
    quad.validate();
    detail::require_area(domain);
    if (const auto* raster = std::get_if<RasterField>(&field)) {
        const auto s = detail::raster_samples(*raster, domain);
        if (s.count == 0) throw Error(ErrorCode::EmptyQuadrature, "no pixel center falls inside the domain");
        return s.sum_sq * raster->pixel_size * raster->pixel_size;
    }
    auto f2 = [&](Point x) {
        const double v = evaluate(field, x);
        return v * v;
    };
    if (quad.method == QuadratureSpec::Method::PixelCenter) {
        const auto s = detail::grid_samples(f2, domain, quad.order);
        if (s.count == 0) throw Error(ErrorCode::EmptyQuadrature, "no sample point falls inside the domain");
        return s.sum / static_cast<double>(s.count) * domain.area();
    }
    return detail::gauss_integral(f2, domain, quad);
}

} // namespace vgrt
