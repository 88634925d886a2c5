#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"

namespace coco {

// Snap tolerance for clipping and for classifying a step as active, as a
// function of the tracked set's initial diameter. The tracked set matches
// the exact intersection to within a small multiple of this.
inline double snap_tolerance(double diameter) {
    return 1e-9 * std::max(1.0, diameter);
}

// Revealed constraints have emptied the running intersection: no point
// satisfies every constraint seen so far.
class FeasibilityViolated : public std::runtime_error {
public:
    explicit FeasibilityViolated(std::size_t round);
    std::size_t round() const { return round_; }

private:
    std::size_t round_;
};

// Geometry measured while one revealed constraint cuts the feasible set.
// All quantities refer to the action x handed to reveal(): p is the vector
// from x to its nearest point of the post-cut set, and [chord_a, chord_b]
// is the chord of the pre-cut set along the supporting line through proj
// perpendicular to p. w_a <= w_b split w at proj.
struct StepGeometry {
    double violation = 0.0;  // max(0, g(x))
    double p_norm = 0.0;
    Point2 proj{};
    Point2 chord_a{};
    Point2 chord_b{};
    double w = 0.0;
    double w_a = 0.0;
    double w_b = 0.0;
    double delta_perim = 0.0;  // perimeter decrease of the feasible set
    double delta_area = 0.0;   // area decrease
    bool active = false;       // p_norm > snap tolerance
    bool cut = false;          // the constraint changed the set
};

// The running intersection S_t of the domain with every revealed
// constraint. The vertex cycle is clipped in place; perimeter and shoelace
// sums are maintained incrementally from clip deltas and recomputed in full
// every 1024 rounds to cap drift.
class NestedState {
public:
    explicit NestedState(const ConvexPolygon& domain);

    const std::vector<Point2>& vertices() const { return verts_; }
    ConvexPolygon snapshot() const { return ConvexPolygon::trusted(verts_); }
    std::size_t size() const { return verts_.size(); }
    std::size_t rounds() const { return round_; }
    double snap_tol() const { return snap_tol_; }

    double perimeter() const { return perim_sum_; }
    double area() const { return 0.5 * cross_sum_; }
    double perimeter_exact() const { return geo::perimeter(verts_); }
    double area_exact() const { return geo::area(verts_); }

    Point2 project(Point2 q) const { return geo::project(verts_, q); }
    bool contains(Point2 q, double tol) const { return geo::contains(verts_, q, tol); }
    double support(Vec2 u) const { return geo::support(verts_, u); }
    Chord chord(Point2 through, Vec2 dir) const {
        return geo::chord(verts_, through, dir, snap_tol_);
    }

    // Reveals the round's constraint, cuts the set, and measures the step
    // geometry for the action x. x_in_prev marks actions known to lie in
    // the pre-cut set, which skips a point-location query. Projection onto
    // the post-cut set is resolved on the pre-cut cycle (directly, or via
    // the cut face), so no copy is made. Throws FeasibilityViolated when
    // the set empties.
    StepGeometry reveal(const HalfPlane& g, Point2 x, bool x_in_prev);

    // Reveals a constraint whose feasible region is the given convex cycle,
    // cutting by each of its edges. The region must have nonempty interior.
    // viol is the caller-evaluated constraint value at x (the cuts alone do
    // not determine its scale). p is always measured against the post-cut
    // set, so x_in_prev only certifies that the chord of the pre-cut set is
    // meaningful for active steps.
    StepGeometry reveal_polytope(std::span<const Point2> target, Point2 x,
                                 bool x_in_prev, double viol);

    // Nearest point of the current set for a point y that belonged to the
    // set before the most recent cut. O(1) after a half-plane cut.
    Point2 advance_member(Point2 y) const;

private:
    void apply_cut(const HalfPlane& g, StepGeometry& out);
    void maybe_recompute();

    std::vector<Point2> verts_;
    double snap_tol_;
    double perim_sum_;
    double cross_sum_;
    std::size_t round_ = 0;
    Chord last_face_{};
    HalfPlane last_cut_{};
    bool has_face_ = false;
    bool poly_cut_last_ = false;

    static constexpr std::size_t kRecomputeEvery = 1024;
};

}  // namespace coco
