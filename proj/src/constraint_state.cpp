#include "constraint_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace coco {

FeasibilityViolated::FeasibilityViolated(std::size_t round)
    : std::runtime_error("constraints admit no common point as of round " +
                         std::to_string(round)),
      round_(round) {}

NestedState::NestedState(const ConvexPolygon& domain)
    : verts_(domain.vertices().begin(), domain.vertices().end()) {
    snap_tol_ = snap_tolerance(geo::diameter(verts_));
    perim_sum_ = geo::perimeter(verts_);
    cross_sum_ = 2.0 * geo::area(verts_);
}

namespace {

void split_widths(const Chord& cab, Point2 proj, StepGeometry& out) {
    out.chord_a = cab.a;
    out.chord_b = cab.b;
    out.w = cab.length();
    double da = distance(proj, cab.a), db = distance(proj, cab.b);
    out.w_a = std::min(da, db);
    out.w_b = std::max(da, db);
}

}  // namespace

void NestedState::apply_cut(const HalfPlane& g, StepGeometry& out) {
    ClipDelta d;
    ClipResult res = geo::clip_inplace(verts_, g, snap_tol_, &d);
    if (res == ClipResult::empty) throw FeasibilityViolated(round_);
    if (res == ClipResult::cut) {
        out.cut = true;
        perim_sum_ += d.perim_added - d.perim_removed;
        cross_sum_ += d.cross_added - d.cross_removed;
        out.delta_perim += d.perim_removed - d.perim_added;
        out.delta_area += 0.5 * (d.cross_removed - d.cross_added);
        if (d.has_face) {
            last_face_ = d.face;
            last_cut_ = g;
            has_face_ = true;
        }
    }
}

void NestedState::maybe_recompute() {
    if (round_ % kRecomputeEvery == 0) {
        perim_sum_ = geo::perimeter(verts_);
        cross_sum_ = 2.0 * geo::area(verts_);
    }
}

StepGeometry NestedState::reveal(const HalfPlane& g, Point2 x, bool x_in_prev) {
    ++round_;
    poly_cut_last_ = false;
    StepGeometry out;
    out.violation = std::max(0.0, g.eval(x));

    // Projection onto the post-cut set without touching it yet: if the cut is
    // slack at the pre-cut projection, that projection stands; otherwise the
    // post-cut projection lies on the cut face, a single segment.
    Point2 proj0 = x_in_prev ? x : geo::project(verts_, x);
    double s0 = g.eval(proj0);
    Point2 proj;
    Chord cab{};
    bool chord_is_face = false;
    if (s0 <= snap_tol_) {
        proj = proj0;
    } else {
        if (-support(-g.normal) - g.offset > snap_tol_) throw FeasibilityViolated(round_);
        Point2 foot = proj0 - g.normal * s0;
        Chord face = geo::chord(verts_, foot, g.normal.perp(), snap_tol_);
        Vec2 ab = face.b - face.a;
        double len2 = ab.norm_sq();
        double t = len2 == 0.0 ? 0.0 : (x - face.a).dot(ab) / len2;
        if (len2 == 0.0 || t <= 0.0) {
            proj = face.a;
        } else if (t >= 1.0) {
            proj = face.b;
        } else {
            proj = face.a + ab * t;
            cab = face;
            chord_is_face = true;
        }
    }

    Vec2 p = proj - x;
    double pn = p.norm();
    if (pn <= snap_tol_) {
        out.p_norm = pn;
        out.proj = proj;
        out.chord_a = out.chord_b = proj;
        apply_cut(g, out);
        maybe_recompute();
        return out;
    }
    out.active = true;
    out.p_norm = pn;
    out.proj = proj;
    if (!chord_is_face) cab = geo::chord(verts_, proj, (p * (1.0 / pn)).perp(), snap_tol_);
    split_widths(cab, proj, out);
    apply_cut(g, out);
    maybe_recompute();
    return out;
}

StepGeometry NestedState::reveal_polytope(std::span<const Point2> target, Point2 x,
                                          bool, double viol) {
    if (target.size() < 3)
        throw std::invalid_argument("polytope constraint needs a 2d feasible region");
    ++round_;
    poly_cut_last_ = true;
    StepGeometry out;
    out.violation = std::max(0.0, viol);

    std::vector<Point2> prev = verts_;
    for (std::size_t i = 0; i < target.size(); ++i) {
        Point2 a = target[i], b = target[(i + 1) % target.size()];
        apply_cut(HalfPlane::through(a, -((b - a).perp())), out);
    }
    maybe_recompute();

    Point2 proj = geo::project(verts_, x);
    double pn = distance(x, proj);
    out.p_norm = pn;
    out.proj = proj;
    if (pn <= snap_tol_) {
        out.chord_a = out.chord_b = proj;
        return out;
    }
    out.active = true;
    split_widths(geo::chord(prev, proj, ((proj - x) * (1.0 / pn)).perp(), snap_tol_),
                 proj, out);
    return out;
}

Point2 NestedState::advance_member(Point2 y) const {
    if (poly_cut_last_) return geo::project(verts_, y);
    if (!has_face_ || last_cut_.eval(y) <= snap_tol_) return y;
    return geo::project_point_segment(y, last_face_.a, last_face_.b);
}

}  // namespace coco
