#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

namespace coco {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double px, double py) : x(px), y(py) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const;
    double norm_sq() const { return x * x + y * y; }
    Vec2 normalized() const;
    // CCW rotation by 90 degrees.
    Vec2 perp() const { return {-y, x}; }
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2() = default;
    Point2(double px, double py) : x(px), y(py) {}

    Vec2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
    Point2 operator+(Vec2 v) const { return {x + v.x, y + v.y}; }
    Point2 operator-(Vec2 v) const { return {x - v.x, y - v.y}; }
    bool operator==(const Point2&) const = default;
};

double distance(Point2 a, Point2 b);
bool is_finite(Point2 p);

// Closed half-plane {z : normal . z <= offset} with unit normal.
struct HalfPlane {
    Vec2 normal{1.0, 0.0};
    double offset = 0.0;

    HalfPlane() = default;
    // Normalizes the pair; throws std::invalid_argument on a zero normal.
    HalfPlane(Vec2 n, double off);

    // Signed distance to the boundary line; <= 0 inside.
    double eval(Point2 q) const { return normal.x * q.x + normal.y * q.y - offset; }
    bool contains(Point2 q, double tol = 0.0) const { return eval(q) <= tol; }

    // Half-plane whose boundary passes through p with the given outward normal.
    static HalfPlane through(Point2 p, Vec2 outward_normal);
};

struct Chord {
    Point2 a;
    Point2 b;
    double length() const { return distance(a, b); }
};

enum class ClipResult { untouched, cut, empty };

// Boundary bookkeeping for a single half-plane cut, so callers can maintain
// running perimeter and shoelace sums in O(cut size) instead of O(n).
struct ClipDelta {
    double perim_removed = 0.0;
    double perim_added = 0.0;
    double cross_removed = 0.0;  // shoelace terms cross(v_i, v_{i+1})
    double cross_added = 0.0;
    Chord face{};  // the new boundary run on the cut line, when one exists
    bool has_face = false;
};

// Kernels over a raw CCW vertex cycle. Degenerate cycles are legal: one
// vertex is a point, two vertices a segment. A segment's perimeter is twice
// its length, which keeps the edge-sum perimeter equal to the Cauchy width
// integral in the degenerate limit.
namespace geo {

double area(std::span<const Point2> v);
double perimeter(std::span<const Point2> v);
double diameter(std::span<const Point2> v);  // O(n^2)
Point2 vertex_mean(std::span<const Point2> v);

// Index of a vertex maximizing u . vertex. O(log n) on large cycles with a
// scan fallback, so the result is always a true maximizer of the dot value.
std::size_t extreme_vertex(std::span<const Point2> v, Vec2 u);
double support(std::span<const Point2> v, Vec2 u);
double width(std::span<const Point2> v, Vec2 u);
// Quadrature of (1/2) Int_0^2pi width(theta) dtheta over n_dirs directions.
double cauchy_perimeter(std::span<const Point2> v, int n_dirs);

Point2 project_point_segment(Point2 q, Point2 a, Point2 b);

Point2 project(std::span<const Point2> v, Point2 q);
double distance_to(std::span<const Point2> v, Point2 q);
bool contains(std::span<const Point2> v, Point2 q, double tol);

// Extreme points along dir of the cycle's intersection with the line
// {through + s * dir}. dir must be unit length; through anchors the line
// but need not lie inside the cycle. Vertices within tol of the line count
// as on it. Throws std::invalid_argument when the line misses the cycle by
// more than tol.
Chord chord(std::span<const Point2> v, Point2 through, Vec2 dir, double tol);

// Single half-plane cut, in place. Vertices with signed distance s > tol
// are removed, vertices with |s| <= tol are snapped onto the cut line, and
// a run of on-line vertices is collapsed to its two extreme points. Fills
// delta with the boundary terms that changed. On ClipResult::empty the
// vector is left cleared.
ClipResult clip_inplace(std::vector<Point2>& verts, const HalfPlane& h,
                        double tol, ClipDelta* delta = nullptr);

}  // namespace geo

// Convex region stored as a CCW vertex cycle.
class ConvexPolygon {
public:
    // Canonicalizes arbitrary input: re-orients CW vertex order, merges
    // duplicate points, drops collinear vertices, collapses collinear input
    // to a segment. Throws std::invalid_argument on an empty list,
    // non-finite coordinates, or a vertex strictly inside the hull of the
    // others (a non-convex cycle).
    explicit ConvexPolygon(std::vector<Point2> vertices);

    static ConvexPolygon rectangle(double x0, double y0, double x1, double y1);
    static ConvexPolygon regular(int n, double circumradius, Point2 center = {},
                                 double phase = 0.0);

    std::span<const Point2> vertices() const { return verts_; }
    std::size_t size() const { return verts_.size(); }
    const Point2& vertex(std::size_t i) const { return verts_[i]; }
    bool is_point() const { return verts_.size() == 1; }
    bool is_segment() const { return verts_.size() == 2; }

    double area() const { return geo::area(verts_); }
    double perimeter() const { return geo::perimeter(verts_); }
    double diameter() const { return geo::diameter(verts_); }

    std::size_t extreme_vertex(Vec2 u) const { return geo::extreme_vertex(verts_, u); }
    double support(Vec2 u) const { return geo::support(verts_, u); }
    double width(Vec2 u) const { return geo::width(verts_, u); }
    double cauchy_perimeter(int n_dirs) const { return geo::cauchy_perimeter(verts_, n_dirs); }

    Point2 project(Point2 q) const { return geo::project(verts_, q); }
    double distance_to(Point2 q) const { return geo::distance_to(verts_, q); }
    bool contains(Point2 q, double tol) const { return geo::contains(verts_, q, tol); }
    Chord chord(Point2 through, Vec2 dir, double tol) const {
        return geo::chord(verts_, through, dir, tol);
    }

    std::optional<ConvexPolygon> clip(const HalfPlane& h, double snap_tol) const;
    std::optional<ConvexPolygon> clip(const HalfPlane& h, double snap_tol,
                                      ClipDelta& delta) const;

    // 1e-9 * max(1, diameter).
    double default_snap_tol() const;

    nlohmann::json to_json() const;
    static ConvexPolygon from_json(const nlohmann::json& j);

    bool operator==(const ConvexPolygon&) const = default;

    // Wraps an already canonical CCW cycle without validation.
    static ConvexPolygon trusted(std::vector<Point2> verts);

private:
    ConvexPolygon() = default;

    std::vector<Point2> verts_;
};

// CCW hull starting from the lexicographically smallest point; collinear
// input collapses to a segment, coincident input to a point.
ConvexPolygon convex_hull(std::vector<Point2> pts);

}  // namespace coco
