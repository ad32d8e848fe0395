#include "lanetrack/geometry.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

namespace lanetrack {

double cross(const Point2D& a, const Point2D& b, const Point2D& p) {
    return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

namespace {

// Lexicographic (x, then y) for deterministic anchor selection.
bool lex_less(const Point2D& a, const Point2D& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
}

// Recursive half: appends hull points strictly right of p->q, ordered along
// the chain from p to q (endpoints excluded). Ties on the farthest point are
// broken by the lowest index into `pts`.
void find_hull(const std::vector<Point2D>& pts, const std::vector<std::size_t>& subset,
               const Point2D& p, const Point2D& q, std::vector<std::size_t>& out) {
    if (subset.empty()) return;

    std::size_t farthest = subset.front();
    double best = -1.0;
    for (std::size_t idx : subset) {
        // cross < 0 for points right of p->q; -cross is proportional to the
        // perpendicular distance.
        double d = -cross(p, q, pts[idx]);
        if (d > best || (d == best && idx < farthest)) {
            best = d;
            farthest = idx;
        }
    }

    const Point2D& c = pts[farthest];
    std::vector<std::size_t> right_pc, right_cq;
    for (std::size_t idx : subset) {
        if (idx == farthest) continue;
        if (cross(p, c, pts[idx]) < 0.0)
            right_pc.push_back(idx);
        else if (cross(c, q, pts[idx]) < 0.0)
            right_cq.push_back(idx);
        // Points inside triangle p-c-q (or on its edges) are discarded.
    }

    find_hull(pts, right_pc, p, c, out);
    out.push_back(farthest);
    find_hull(pts, right_cq, c, q, out);
}

}  // namespace

ConvexPolygon quickhull(const std::vector<Point2D>& points) {
    if (points.size() < 3) throw DegenerateInput("quickhull: need at least 3 points");
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw DegenerateInput("quickhull: non-finite coordinate");
    }

    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (lex_less(points[i], points[lo])) lo = i;
        if (lex_less(points[hi], points[i])) hi = i;
    }
    if (points[lo] == points[hi]) throw DegenerateInput("quickhull: all points coincide");

    const Point2D a = points[lo], b = points[hi];
    std::vector<std::size_t> below, above;  // strictly right of a->b resp. b->a
    for (std::size_t i = 0; i < points.size(); ++i) {
        double d = cross(a, b, points[i]);
        if (d < 0.0)
            below.push_back(i);
        else if (d > 0.0)
            above.push_back(i);
    }
    if (below.empty() && above.empty())
        throw DegenerateInput("quickhull: all points collinear");

    // a -> (chain right of a->b) -> b -> (chain right of b->a) is CCW under
    // the shoelace sign convention.
    std::vector<std::size_t> order;
    order.push_back(lo);
    find_hull(points, below, a, b, order);
    order.push_back(hi);
    find_hull(points, above, b, a, order);

    ConvexPolygon hull;
    hull.vertices.reserve(order.size());
    for (std::size_t idx : order) hull.vertices.push_back(points[idx]);
    return hull;
}

double polygon_area(const ConvexPolygon& poly) {
    double twice = 0.0;
    const auto& v = poly.vertices;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const Point2D& p = v[i];
        const Point2D& q = v[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    return 0.5 * twice;
}

Point2D polygon_centroid(const ConvexPolygon& poly) {
    const auto& v = poly.vertices;
    if (v.size() < 3) throw DegenerateInput("polygon_centroid: need at least 3 vertices");

    double twice_area = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const Point2D& p = v[i];
        const Point2D& q = v[(i + 1) % n];
        double d = p.x * q.y - q.x * p.y;
        twice_area += d;
        cx += (p.x + q.x) * d;
        cy += (p.y + q.y) * d;
    }
    if (std::abs(twice_area) < 1e-12)
        throw DegenerateInput("polygon_centroid: zero-area polygon");
    return {cx / (3.0 * twice_area), cy / (3.0 * twice_area)};
}

double point_line_distance(const Line2D& line, const Point2D& p) {
    double norm_sq = line.a * line.a + line.b * line.b;
    if (norm_sq == 0.0) throw DegenerateInput("point_line_distance: a = b = 0");
    return std::abs(line.a * p.x + line.b * p.y + line.c) / std::sqrt(norm_sq);
}

double signed_center_offset(const Point2D& p, double center_x) {
    return p.x - center_x;
}

bool polygon_contains(const ConvexPolygon& poly, const Point2D& p, double eps) {
    const auto& v = poly.vertices;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        if (cross(v[i], v[(i + 1) % n], p) < -eps) return false;
    }
    return true;
}

}  // namespace lanetrack
