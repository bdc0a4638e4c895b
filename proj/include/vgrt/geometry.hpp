#pragma once

// Planar polygon primitives: area, centroid, half-plane clipping that keeps
// disconnected pieces apart, ray casting, point location and Voronoi cells
// restricted to a parent region.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "error.hpp"

namespace vgrt {

/// Relative tolerance for coincidence and degeneracy tests; multiplied by the
/// bounding-box diameter of whatever region is being processed.
inline constexpr double kGeomRelEps = 1e-12;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point operator-(Point a) { return {-a.x, -a.y}; }
    friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend constexpr Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr Point operator/(Point a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(Point a, Point b) = default;
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }
inline Point unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

struct BoundingBox {
    Point lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Point hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

    void expand(Point p) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    bool valid() const { return lo.x <= hi.x && lo.y <= hi.y; }
    double width() const { return valid() ? hi.x - lo.x : 0.0; }
    double height() const { return valid() ? hi.y - lo.y : 0.0; }
    double diameter() const { return valid() ? std::hypot(width(), height()) : 0.0; }
};

/// Counter-clockwise simple polygon, closed implicitly.
struct Polygon {
    std::vector<Point> vertices;
};

inline double signed_area(std::span<const Point> ring) {
    const std::size_t n = ring.size();
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += cross(ring[i], ring[(i + 1) % n]);
    return 0.5 * acc;
}

inline BoundingBox bounding_box(std::span<const Point> pts) {
    BoundingBox box;
    for (Point p : pts) box.expand(p);
    return box;
}

/// Shoelace area of a CCW polygon.
inline double polygon_area(const Polygon& poly) {
    const double diam = bounding_box(poly.vertices).diameter();
    const double eps = kGeomRelEps * diam;
    const double a = signed_area(poly.vertices);
    if (poly.vertices.size() < 3 || !(a >= eps * eps))
        throw Error(ErrorCode::DegenerateGeometry, "polygon area is not positive (need >= 3 CCW vertices)");
    return a;
}

inline Point polygon_centroid(const Polygon& poly) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    // Shift to the first vertex to limit cancellation for small far-away cells.
    const Point o = v.empty() ? Point{} : v[0];
    double a2 = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = v[i] - o, q = v[(i + 1) % n] - o;
        const double c = cross(p, q);
        a2 += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    if (a2 == 0.0) throw Error(ErrorCode::DegenerateGeometry, "centroid of zero-area polygon");
    return o + Point{cx / (3.0 * a2), cy / (3.0 * a2)};
}

namespace detail {

inline bool segments_properly_intersect(Point a, Point b, Point c, Point d) {
    const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

inline double point_segment_distance(Point p, Point a, Point b) {
    const Point e = b - a;
    const double len2 = dot(e, e);
    double t = len2 > 0.0 ? dot(p - a, e) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + t * e);
}

// Drops repeated vertices and vertices lying on the segment joining their
// neighbours (this also removes zero-width spikes).
inline std::vector<Point> simplify_ring(std::vector<Point> ring, double eps) {
    bool changed = true;
    while (changed && ring.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < ring.size() && ring.size() >= 3;) {
            const std::size_t n = ring.size();
            const Point a = ring[(i + n - 1) % n], b = ring[i], c = ring[(i + 1) % n];
            bool drop = distance(a, b) <= eps;
            if (!drop) {
                const double base = distance(a, c);
                drop = base <= eps || std::abs(cross(b - a, c - a)) <= eps * base;
            }
            if (drop) {
                ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
            } else {
                ++i;
            }
        }
    }
    if (ring.size() < 3) ring.clear();
    return ring;
}

} // namespace detail

/// Validates and normalizes raw vertices into a Polygon: removes repeated
/// vertices, orients counter-clockwise and rejects self-intersections.
inline Polygon make_polygon(std::vector<Point> vertices) {
    for (Point p : vertices)
        if (!is_finite(p)) throw Error(ErrorCode::InvalidArgument, "polygon vertex is not finite");
    if (vertices.size() >= 2 && vertices.front() == vertices.back()) vertices.pop_back();
    const double eps = kGeomRelEps * bounding_box(vertices).diameter();
    vertices = detail::simplify_ring(std::move(vertices), eps);
    if (vertices.size() < 3) throw Error(ErrorCode::DegenerateGeometry, "polygon needs at least 3 distinct vertices");
    if (signed_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (detail::segments_properly_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
                                                    vertices[(j + 1) % n]))
                throw Error(ErrorCode::DegenerateGeometry, "polygon is self-intersecting");
        }
    }
    Polygon poly{std::move(vertices)};
    polygon_area(poly);
    return poly;
}

/// A possibly disconnected planar set: disjoint CCW pieces with cached area
/// and area-weighted centroid. No pieces means the empty set.
class Region {
public:
    Region() = default;
    explicit Region(Polygon piece) : Region(std::vector<Polygon>{std::move(piece)}) {}
    explicit Region(std::vector<Polygon> pieces) : pieces_(std::move(pieces)) {
        double cx = 0.0, cy = 0.0;
        for (const auto& p : pieces_) {
            const double a = signed_area(p.vertices);
            const Point c = polygon_centroid(p);
            area_ += a;
            cx += a * c.x;
            cy += a * c.y;
            for (Point v : p.vertices) box_.expand(v);
        }
        if (area_ > 0.0) centroid_ = {cx / area_, cy / area_};
    }

    static Region empty_region() { return Region{}; }

    const std::vector<Polygon>& pieces() const { return pieces_; }
    double area() const { return area_; }
    bool empty() const { return pieces_.empty(); }
    const BoundingBox& bbox() const { return box_; }
    double eps() const { return kGeomRelEps * box_.diameter(); }

    /// Area-weighted centroid; meaningless for the empty region.
    Point centroid_unchecked() const { return centroid_; }

private:
    std::vector<Polygon> pieces_;
    double area_ = 0.0;
    Point centroid_{};
    BoundingBox box_;
};

inline double region_area(const Region& region) { return region.area(); }

inline Point region_centroid(const Region& region) {
    if (region.empty() || !(region.area() > 0.0))
        throw Error(ErrorCode::DegenerateGeometry, "centroid of an empty region");
    return region.centroid_unchecked();
}

/// Largest distance between any two vertices of the region.
inline double region_diameter(const Region& region) {
    double best = 0.0;
    std::vector<Point> all;
    for (const auto& p : region.pieces()) all.insert(all.end(), p.vertices.begin(), p.vertices.end());
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) best = std::max(best, distance(all[i], all[j]));
    return best;
}

/// The closed set {p : dot(p, normal) <= offset}.
struct HalfPlane {
    Point normal{1.0, 0.0};
    double offset = 0.0;

    static HalfPlane from(Point direction, double offset) {
        const double len = norm(direction);
        if (!(len > 0.0) || !std::isfinite(len)) throw Error(ErrorCode::InvalidArgument, "half-plane normal is zero");
        return {direction / len, offset / len};
    }

    /// Points at least as close to `own` as to `other`.
    static HalfPlane bisector(Point own, Point other) {
        const Point n = other - own;
        const double len = norm(n);
        if (!(len > 0.0)) throw Error(ErrorCode::DegenerateConfiguration, "bisector of coincident points");
        const Point unit = n / len;
        return {unit, dot(unit, 0.5 * (own + other))};
    }

    HalfPlane complement() const { return {-normal, -offset}; }
    double signed_distance(Point p) const { return dot(p, normal) - offset; }
};

namespace detail {

struct ClipNode {
    Point p;
    enum Kind { Vertex, Entry, Exit } kind = Vertex;
    double along = 0.0;
    std::size_t next = 0;
};

// Clips one CCW ring. Exits and entries on the cut line are re-linked in
// order along the line so that non-convex input splits into separate rings
// rather than rings joined by zero-width bridges.
inline void clip_ring(const std::vector<Point>& ring, const HalfPlane& hp, double eps,
                      std::vector<std::vector<Point>>& out) {
    const std::size_t n = ring.size();
    std::vector<double> s(n);
    bool any_in = false, any_out = false;
    for (std::size_t i = 0; i < n; ++i) {
        double d = hp.signed_distance(ring[i]);
        if (std::abs(d) <= eps) d = 0.0;
        s[i] = d;
        (d <= 0.0 ? any_in : any_out) = true;
    }
    if (!any_in) return;
    if (!any_out) {
        out.push_back(ring);
        return;
    }

    const Point dir{-hp.normal.y, hp.normal.x};
    std::vector<ClipNode> nodes;
    nodes.reserve(n + 4);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const bool in_i = s[i] <= 0.0, in_j = s[j] <= 0.0;
        if (in_i) nodes.push_back({ring[i], ClipNode::Vertex});
        if (in_i != in_j) {
            const double t = s[i] / (s[i] - s[j]);
            const Point p = ring[i] + t * (ring[j] - ring[i]);
            nodes.push_back({p, in_i ? ClipNode::Exit : ClipNode::Entry, dot(p, dir)});
        }
    }

    std::vector<std::size_t> crossings;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        nodes[k].next = (k + 1) % nodes.size();
        if (nodes[k].kind != ClipNode::Vertex) crossings.push_back(k);
    }
    std::stable_sort(crossings.begin(), crossings.end(), [&](std::size_t a, std::size_t b) {
        if (nodes[a].along != nodes[b].along) return nodes[a].along < nodes[b].along;
        return nodes[a].kind == ClipNode::Exit && nodes[b].kind == ClipNode::Entry;
    });
    if (crossings.size() % 2 != 0)
        throw Error(ErrorCode::DegenerateGeometry, "half-plane clip produced an odd crossing count");
    for (std::size_t k = 0; k < crossings.size(); k += 2) {
        const std::size_t exit = crossings[k], entry = crossings[k + 1];
        if (nodes[exit].kind != ClipNode::Exit || nodes[entry].kind != ClipNode::Entry)
            throw Error(ErrorCode::DegenerateGeometry, "half-plane clip produced inconsistent crossings");
        nodes[exit].next = entry;
    }

    std::vector<char> visited(nodes.size(), 0);
    for (std::size_t start = 0; start < nodes.size(); ++start) {
        if (visited[start]) continue;
        std::vector<Point> piece;
        std::size_t k = start;
        std::size_t guard = 0;
        while (!visited[k]) {
            visited[k] = 1;
            piece.push_back(nodes[k].p);
            k = nodes[k].next;
            if (++guard > nodes.size()) break;
        }
        out.push_back(std::move(piece));
    }
}

inline Region assemble(std::vector<std::vector<Point>> rings, double eps) {
    std::vector<Polygon> pieces;
    for (auto& ring : rings) {
        ring = simplify_ring(std::move(ring), eps);
        if (ring.size() < 3) continue;
        const double a = signed_area(ring);
        // Slivers narrower than eps are numerical residue of cuts through vertices.
        const double diam = bounding_box(ring).diameter();
        if (a <= eps * diam) continue;
        pieces.push_back(Polygon{std::move(ring)});
    }
    if (pieces.empty()) return Region::empty_region();
    return Region(std::move(pieces));
}

} // namespace detail

/// region ∩ hp. The result may have more pieces than the input when a
/// non-convex piece is cut; an empty intersection yields the empty region.
inline Region clip_halfplane(const Region& region, const HalfPlane& hp) {
    if (region.empty()) return region;
    const double eps = region.eps();
    std::vector<std::vector<Point>> rings;
    for (const auto& piece : region.pieces()) detail::clip_ring(piece.vertices, hp, eps, rings);
    return detail::assemble(std::move(rings), eps);
}

/// Half-open crossing-number test: a point on an edge shared by two
/// neighbouring polygons is counted in exactly one of them.
inline bool polygon_contains(const Polygon& poly, Point p) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point a = v[j], b = v[i];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

inline double boundary_distance(const Region& region, Point p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& piece : region.pieces()) {
        const auto& v = piece.vertices;
        for (std::size_t i = 0; i < v.size(); ++i)
            best = std::min(best, detail::point_segment_distance(p, v[i], v[(i + 1) % v.size()]));
    }
    return best;
}

inline bool contains(const Region& region, Point p) {
    for (const auto& piece : region.pieces())
        if (polygon_contains(piece, p)) return true;
    return false;
}

/// Closed membership: inside, or within `tol` of the boundary.
inline bool contains_closed(const Region& region, Point p, double tol) {
    return contains(region, p) || boundary_distance(region, p) <= tol;
}

inline bool strictly_inside(const Region& region, Point p) {
    return contains(region, p) && boundary_distance(region, p) > region.eps();
}

/// Smallest alpha > 0 such that origin + alpha * direction lies on the
/// region boundary. `origin` must be strictly inside.
inline double ray_first_exit(const Region& region, Point origin, Point direction) {
    if (!is_finite(origin) || !is_finite(direction) || std::abs(norm(direction) - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidArgument, "ray direction must be a finite unit vector");
    if (!strictly_inside(region, origin))
        throw Error(ErrorCode::OriginOutsideRegion, "ray origin is not strictly inside the region");
    constexpr double kParamSlack = 1e-12;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& piece : region.pieces()) {
        const auto& v = piece.vertices;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Point a = v[i], e = v[(i + 1) % v.size()] - a;
            const double denom = cross(direction, e);
            if (std::abs(denom) <= kParamSlack * norm(e)) continue;
            const Point ao = a - origin;
            const double alpha = cross(ao, e) / denom;
            const double t = cross(ao, direction) / denom;
            if (t < -kParamSlack || t > 1.0 + kParamSlack || !(alpha > 0.0)) continue;
            best = std::min(best, alpha);
        }
    }
    if (!std::isfinite(best)) throw Error(ErrorCode::NoIntersection, "ray from an interior point hit no edge");
    return best;
}

/// Voronoi cells of `generators` restricted to `parent`: cell k is the parent
/// clipped by the bisector half-planes against every other generator.
inline std::vector<Region> voronoi_partition(const Region& parent, std::span<const Point> generators) {
    if (generators.empty()) throw Error(ErrorCode::InvalidArgument, "voronoi_partition needs at least one generator");
    const double eps = parent.eps();
    for (Point g : generators) {
        if (!is_finite(g)) throw Error(ErrorCode::InvalidArgument, "generator is not finite");
        if (!contains_closed(parent, g, eps))
            throw Error(ErrorCode::GeneratorOutsideParent, "generator lies outside the parent region");
    }
    for (std::size_t i = 0; i < generators.size(); ++i)
        for (std::size_t j = i + 1; j < generators.size(); ++j)
            if (distance(generators[i], generators[j]) <= eps)
                throw Error(ErrorCode::DegenerateConfiguration, "coincident generators");

    std::vector<Region> cells;
    cells.reserve(generators.size());
    for (std::size_t k = 0; k < generators.size(); ++k) {
        Region cell = parent;
        for (std::size_t j = 0; j < generators.size() && !cell.empty(); ++j) {
            if (j == k) continue;
            cell = clip_halfplane(cell, HalfPlane::bisector(generators[k], generators[j]));
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

using Triangle = std::array<Point, 3>;

/// Ear-clipping triangulation of a simple CCW polygon (fan for convex input).
inline std::vector<Triangle> triangulate(const Polygon& poly) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    std::vector<Triangle> tris;
    if (n < 3) return tris;
    tris.reserve(n - 2);

    bool convex = true;
    for (std::size_t i = 0; i < n && convex; ++i)
        convex = cross(v[(i + 1) % n] - v[i], v[(i + 2) % n] - v[(i + 1) % n]) >= 0.0;
    if (convex) {
        for (std::size_t i = 1; i + 1 < n; ++i) tris.push_back({v[0], v[i], v[i + 1]});
        return tris;
    }

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    auto in_triangle = [](Point p, Point a, Point b, Point c) {
        return cross(b - a, p - a) >= 0.0 && cross(c - b, p - b) >= 0.0 && cross(a - c, p - c) >= 0.0;
    };
    std::size_t guard = 0;
    while (idx.size() > 3 && guard < 4 * n * n) {
        bool clipped = false;
        const std::size_t m = idx.size();
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t ia = idx[(k + m - 1) % m], ib = idx[k], ic = idx[(k + 1) % m];
            const Point a = v[ia], b = v[ib], c = v[ic];
            if (cross(b - a, c - b) <= 0.0) continue;
            bool ear = true;
            for (std::size_t q : idx) {
                if (q == ia || q == ib || q == ic) continue;
                if (v[q] == a || v[q] == b || v[q] == c) continue;
                if (in_triangle(v[q], a, b, c)) {
                    ear = false;
                    break;
                }
            }
            if (!ear) continue;
            tris.push_back({a, b, c});
            idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(k));
            clipped = true;
            break;
        }
        ++guard;
        if (!clipped) break;
    }
    if (idx.size() == 3) {
        tris.push_back({v[idx[0]], v[idx[1]], v[idx[2]]});
    } else if (idx.size() > 3) {
        throw Error(ErrorCode::DegenerateGeometry, "ear clipping failed on polygon");
    }
    return tris;
}

} // namespace vgrt
