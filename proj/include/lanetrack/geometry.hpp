// 2D primitives used by the mask tracking pipeline: QuickHull convex hull,
// polygon area centroid, and point-to-line distance.
//
// All functions are pure; coordinates are real-valued pixels (origin at the
// image top-left, y grows downward).

#pragma once

#include <vector>

#include "lanetrack/errors.hpp"

namespace lanetrack {

struct Point2D {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2D& a, const Point2D& b) {
        return a.x == b.x && a.y == b.y;
    }
};

// Implicit line a*x + b*y + c = 0. Invalid when a = b = 0.
struct Line2D {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    static Line2D vertical(double x0) { return {1.0, 0.0, -x0}; }
    static Line2D horizontal(double y0) { return {0.0, 1.0, -y0}; }
};

// Convex polygon with vertices in counter-clockwise order (positive signed
// area under the shoelace convention). quickhull() is the only constructor
// that guarantees the invariants: >= 3 vertices, strictly convex.
struct ConvexPolygon {
    std::vector<Point2D> vertices;
};

// Minimal convex polygon containing all input points. Vertices are a subset
// of the input, CCW-ordered, with no duplicate or collinear vertices.
// Throws DegenerateInput for < 3 points, non-finite coordinates, or an
// all-collinear set.
ConvexPolygon quickhull(const std::vector<Point2D>& points);

// Area centroid of the enclosed region (first moment over area), not the
// vertex mean. Throws DegenerateInput when the polygon area is ~zero.
Point2D polygon_centroid(const ConvexPolygon& poly);

// |a*x0 + b*y0 + c| / sqrt(a^2 + b^2). Throws DegenerateInput if a = b = 0.
double point_line_distance(const Line2D& line, const Point2D& p);

// p.x - center_x. Sign convention: positive means p lies right of the
// vertical line x = center_x; magnitude equals point_line_distance against
// that line.
double signed_center_offset(const Point2D& p, double center_x);

// Twice the signed area of triangle (a, b, p); > 0 when p is left of a->b.
double cross(const Point2D& a, const Point2D& b, const Point2D& p);

// Signed polygon area (positive for CCW vertex order).
double polygon_area(const ConvexPolygon& poly);

// True when p lies inside or on the boundary of a CCW convex polygon,
// within eps on the edge half-plane tests.
bool polygon_contains(const ConvexPolygon& poly, const Point2D& p, double eps = 1e-9);

}  // namespace lanetrack
