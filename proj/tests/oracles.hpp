#pragma once

// Reference implementations used to check the fast geometry kernels. These
// are deliberately simple linear or quadratic algorithms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "geometry.hpp"

namespace oracle {

using coco::Chord;
using coco::ConvexPolygon;
using coco::HalfPlane;
using coco::Point2;
using coco::Vec2;

inline std::size_t extreme_scan(std::span<const Point2> v, Vec2 u) {
    std::size_t best = 0;
    double fb = u.dot(v[0] - Point2{0.0, 0.0});
    for (std::size_t i = 1; i < v.size(); ++i) {
        double f = u.dot(v[i] - Point2{0.0, 0.0});
        if (f > fb) {
            fb = f;
            best = i;
        }
    }
    return best;
}

inline bool inside_all_edges(std::span<const Point2> v, Point2 q) {
    std::size_t n = v.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        Point2 a = v[i], b = v[(i + 1) % n];
        if ((b - a).cross(q - a) < 0.0) return false;
    }
    return true;
}

// Exact nearest point: the minimum over all edges, or q itself when inside.
inline Point2 project_scan(std::span<const Point2> v, Point2 q) {
    if (v.size() == 1) return v[0];
    if (inside_all_edges(v, q)) return q;
    std::size_t n = v.size();
    Point2 best = v[0];
    double db = coco::distance(q, v[0]);
    for (std::size_t i = 0; i < n; ++i) {
        Point2 p = coco::geo::project_point_segment(q, v[i], v[(i + 1) % n]);
        double d = coco::distance(q, p);
        if (d < db) {
            db = d;
            best = p;
        }
    }
    return best;
}

inline double distance_scan(std::span<const Point2> v, Point2 q) {
    if (v.size() >= 3 && inside_all_edges(v, q)) return 0.0;
    return coco::distance(q, project_scan(v, q));
}

// All intersection points of the cycle with a line, by walking every edge.
inline std::optional<Chord> chord_scan(std::span<const Point2> v, Point2 through,
                                       Vec2 dir, double tol) {
    Vec2 nrm = dir.perp();
    auto sig = [&](Point2 p) { return nrm.dot(p - through); };
    std::vector<Point2> cand;
    std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = sig(v[i]);
        if (std::abs(s) <= tol) cand.push_back(v[i] - nrm * s);
        if (n == 1) break;
        std::size_t j = (i + 1) % n;
        double sj = sig(v[j]);
        if ((s > tol && sj < -tol) || (s < -tol && sj > tol))
            cand.push_back(v[i] + (v[j] - v[i]) * (s / (s - sj)));
        if (n == 2) break;
    }
    if (cand.empty()) return std::nullopt;
    Point2 a = cand[0], b = cand[0];
    for (const Point2& p : cand) {
        if (dir.dot(p - through) < dir.dot(a - through)) a = p;
        if (dir.dot(p - through) > dir.dot(b - through)) b = p;
    }
    return Chord{a, b};
}

// Full-pass half-plane clip with the same snapping and run-collapse
// conventions as the fast kernel: a no-op unless some vertex lies beyond
// +tol, vertices with |s| <= tol snapped onto the line, crossings inserted
// only on edges spanning from below -tol to above +tol, and the on-line run
// reduced to its two end points.
inline std::optional<std::vector<Point2>> clip_scan(std::span<const Point2> v,
                                                    const HalfPlane& h, double tol) {
    std::size_t n = v.size();
    std::vector<double> s(n);
    double smax = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = h.eval(v[i]);
        smax = std::max(smax, s[i]);
    }
    if (smax <= tol) return std::vector<Point2>(v.begin(), v.end());
    auto snap = [&](Point2 p) { return p - h.normal * h.eval(p); };

    std::vector<Point2> out;
    std::vector<bool> on;
    if (n <= 2) {
        for (std::size_t i = 0; i < n; ++i) {
            if (s[i] > tol) continue;
            Point2 p = std::abs(s[i]) <= tol ? snap(v[i]) : v[i];
            out.push_back(p);
            on.push_back(std::abs(s[i]) <= tol);
        }
        if (n == 2 && ((s[0] < -tol && s[1] > tol) || (s[0] > tol && s[1] < -tol))) {
            out.push_back(snap(v[0] + (v[1] - v[0]) * (s[0] / (s[0] - s[1]))));
            on.push_back(true);
        }
        if (out.empty()) return std::nullopt;
        if (out.size() == 2 && coco::distance(out[0], out[1]) == 0.0) out.pop_back();
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = (i + 1) % n;
        if (s[i] <= tol) {
            out.push_back(std::abs(s[i]) <= tol ? snap(v[i]) : v[i]);
            on.push_back(std::abs(s[i]) <= tol);
        }
        if ((s[i] <= -tol && s[j] > tol) || (s[i] > tol && s[j] <= -tol)) {
            out.push_back(snap(v[i] + (v[j] - v[i]) * (s[i] / (s[i] - s[j]))));
            on.push_back(true);
        }
    }
    if (out.empty()) return std::nullopt;
    std::size_t m = out.size();
    if (std::all_of(on.begin(), on.end(), [](bool b) { return b; })) {
        Vec2 along = h.normal.perp();
        Point2 a = out[0], b = out[0];
        for (const Point2& p : out) {
            if (along.dot(p - a) < 0.0) a = p;
            if (along.dot(p - b) > 0.0) b = p;
        }
        std::vector<Point2> res{a};
        if (coco::distance(a, b) > 0.0) res.push_back(b);
        return res;
    }
    // Collapse the single contiguous on-line run to its two ends.
    std::vector<Point2> res;
    for (std::size_t i = 0; i < m; ++i) {
        if (!on[i]) {
            res.push_back(out[i]);
            continue;
        }
        bool run_start = !on[(i + m - 1) % m];
        bool run_end = !on[(i + 1) % m];
        if (run_start || run_end) res.push_back(out[i]);
    }
    std::vector<Point2> ded;
    for (const Point2& p : res)
        if (ded.empty() || coco::distance(ded.back(), p) > 0.0) ded.push_back(p);
    if (ded.size() > 1 && coco::distance(ded.front(), ded.back()) == 0.0) ded.pop_back();
    return ded;
}

// Gift-wrapping hull for cross-checking the monotone chain version.
inline std::vector<Point2> hull_jarvis(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<Point2> hull;
    std::size_t start = 0, cur = 0;
    do {
        hull.push_back(pts[cur]);
        std::size_t cand = (cur + 1) % n;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == cur) continue;
            double c = (pts[cand] - pts[cur]).cross(pts[i] - pts[cur]);
            double further = (pts[i] - pts[cur]).norm_sq() - (pts[cand] - pts[cur]).norm_sq();
            if (c < 0.0 || (c == 0.0 && further > 0.0)) cand = i;
        }
        cur = cand;
    } while (cur != start && hull.size() <= n);
    return hull;
}

// Cyclic comparison of two CCW vertex cycles, tolerant to rotation.
inline bool cycles_match(std::span<const Point2> a, std::span<const Point2> b,
                         double tol) {
    if (a.size() != b.size()) return false;
    std::size_t n = a.size();
    for (std::size_t off = 0; off < n; ++off) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
            ok = coco::distance(a[i], b[(i + off) % n]) <= tol;
        if (ok) return true;
    }
    return false;
}

}  // namespace oracle
