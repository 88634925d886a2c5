#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coco {

double Vec2::norm() const { return std::sqrt(x * x + y * y); }

Vec2 Vec2::normalized() const {
    double n = norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalize a zero vector");
    return {x / n, y / n};
}

double distance(Point2 a, Point2 b) { return (a - b).norm(); }

bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

HalfPlane::HalfPlane(Vec2 n, double off) {
    double len = n.norm();
    if (len == 0.0 || !std::isfinite(len) || !std::isfinite(off))
        throw std::invalid_argument("half-plane needs a finite nonzero normal");
    normal = {n.x / len, n.y / len};
    offset = off / len;
}

HalfPlane HalfPlane::through(Point2 p, Vec2 outward_normal) {
    Vec2 n = outward_normal.normalized();
    return HalfPlane(n, n.dot({p.x, p.y}));
}

namespace geo {

namespace {

std::size_t next_idx(std::size_t i, std::size_t n) { return i + 1 < n ? i + 1 : 0; }
std::size_t prev_idx(std::size_t i, std::size_t n) { return i == 0 ? n - 1 : i - 1; }

double cross3(Point2 a, Point2 b, Point2 c) { return (b - a).cross(c - a); }

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double area(std::span<const Point2> v) {
    std::size_t n = v.size();
    if (n < 3) return 0.0;
    double s = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Point2 a = v[i], b = v[next_idx(i, n)];
        double term = a.x * b.y - a.y * b.x;
        double t = s + term;
        comp += std::abs(s) >= std::abs(term) ? (s - t) + term : (term - t) + s;
        s = t;
    }
    return 0.5 * (s + comp);
}

double perimeter(std::span<const Point2> v) {
    std::size_t n = v.size();
    if (n < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += distance(v[i], v[next_idx(i, n)]);
    return s;
}

double diameter(std::span<const Point2> v) {
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            best = std::max(best, distance(v[i], v[j]));
    return best;
}

Point2 vertex_mean(std::span<const Point2> v) {
    double sx = 0.0, sy = 0.0;
    for (const Point2& p : v) {
        sx += p.x;
        sy += p.y;
    }
    return {sx / static_cast<double>(v.size()), sy / static_cast<double>(v.size())};
}

namespace {

std::size_t extreme_vertex_scan(std::span<const Point2> v, Vec2 u) {
    std::size_t best = 0;
    double fb = u.dot({v[0].x, v[0].y});
    for (std::size_t i = 1; i < v.size(); ++i) {
        double f = u.dot({v[i].x, v[i].y});
        if (f > fb) {
            fb = f;
            best = i;
        }
    }
    return best;
}

}  // namespace

std::size_t extreme_vertex(std::span<const Point2> v, Vec2 u) {
    std::size_t n = v.size();
    if (n == 0) throw std::invalid_argument("extreme_vertex on empty cycle");
    if (n <= 48) return extreme_vertex_scan(v, u);

    // Peak search on the cyclically bitonic sequence u . v_i, after
    // Preparata-Shamos. Exact on strictly convex cycles; near-degenerate
    // edges are mopped up by the hill climb below.
    Vec2 up = u.perp();
    auto cmp = [&](std::size_t i, std::size_t j) {
        return sgn(up.cross(v[i % n] - v[j % n]));
    };
    auto extr = [&](std::size_t i) {
        return cmp(i + 1, i) >= 0 && cmp(i, i + n - 1) < 0;
    };
    std::size_t cand = 0;
    if (!extr(0)) {
        std::size_t lo = 0, hi = n;
        while (lo + 1 < hi) {
            std::size_t m = (lo + hi) / 2;
            if (extr(m)) {
                lo = m;
                break;
            }
            int ls = cmp(lo + 1, lo), ms = cmp(m + 1, m);
            if (ls < ms || (ls == ms && ls == cmp(lo, m)))
                hi = m;
            else
                lo = m;
        }
        cand = lo % n;
    }

    auto f = [&](std::size_t i) { return u.x * v[i].x + u.y * v[i].y; };
    double fc = f(cand);
    for (int step = 0; step < 64; ++step) {
        std::size_t nx = next_idx(cand, n), pv = prev_idx(cand, n);
        if (f(nx) > fc) {
            cand = nx;
            fc = f(nx);
        } else if (f(pv) > fc) {
            cand = pv;
            fc = f(pv);
        } else {
            return cand;
        }
    }
    return extreme_vertex_scan(v, u);
}

double support(std::span<const Point2> v, Vec2 u) {
    const Point2& p = v[extreme_vertex(v, u)];
    return u.x * p.x + u.y * p.y;
}

double width(std::span<const Point2> v, Vec2 u) { return support(v, u) + support(v, -u); }

double cauchy_perimeter(std::span<const Point2> v, int n_dirs) {
    if (n_dirs <= 0) throw std::invalid_argument("cauchy_perimeter needs n_dirs > 0");
    double pi = std::acos(-1.0);
    double s = 0.0;
    for (int k = 0; k < n_dirs; ++k) {
        double th = pi * static_cast<double>(k) / static_cast<double>(n_dirs);
        s += width(v, {std::cos(th), std::sin(th)});
    }
    return s * pi / static_cast<double>(n_dirs);
}

Point2 project_point_segment(Point2 q, Point2 a, Point2 b) {
    Vec2 ab = b - a;
    double len2 = ab.norm_sq();
    if (len2 == 0.0) return a;
    double t = (q - a).dot(ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return a + ab * t;
}

namespace {

struct LocateResult {
    bool inside = false;
    std::size_t seed_edge = 0;
};

// Fan point location around vertex 0. When q is outside, seed_edge is an
// edge visible from q, from which distance to the boundary is downhill
// toward the nearest point.
LocateResult fan_locate(std::span<const Point2> v, Point2 q) {
    std::size_t n = v.size();
    Vec2 rel = q - v[0];
    if ((v[1] - v[0]).cross(rel) < 0.0) return {false, 0};
    if ((v[n - 1] - v[0]).cross(rel) > 0.0) return {false, n - 1};
    std::size_t lo = 1, hi = n - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if ((v[mid] - v[0]).cross(rel) >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    if (cross3(v[lo], v[hi], q) >= 0.0) return {true, 0};
    return {false, lo};
}

double edge_distance(std::span<const Point2> v, std::size_t e, Point2 q) {
    return distance(q, project_point_segment(q, v[e], v[next_idx(e, v.size())]));
}

// Walk downhill in edge distance from the seed edge; the seed is visible
// from q, and distance along the visible chain is unimodal.
std::size_t walk_to_nearest_edge(std::span<const Point2> v, std::size_t seed, Point2 q) {
    std::size_t n = v.size();
    std::size_t best = seed;
    double dbest = edge_distance(v, best, q);
    std::size_t fwd = next_idx(best, n);
    double dfwd = edge_distance(v, fwd, q);
    bool forward = dfwd < dbest;
    if (forward) {
        best = fwd;
        dbest = dfwd;
    }
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t nx = forward ? next_idx(best, n) : prev_idx(best, n);
        double d = edge_distance(v, nx, q);
        if (d < dbest) {
            best = nx;
            dbest = d;
        } else {
            break;
        }
    }
    return best;
}

}  // namespace

Point2 project(std::span<const Point2> v, Point2 q) {
    std::size_t n = v.size();
    if (n == 0) throw std::invalid_argument("project on empty cycle");
    if (n == 1) return v[0];
    if (n == 2) return project_point_segment(q, v[0], v[1]);
    LocateResult loc = fan_locate(v, q);
    if (loc.inside) return q;
    std::size_t e = walk_to_nearest_edge(v, loc.seed_edge, q);
    return project_point_segment(q, v[e], v[next_idx(e, n)]);
}

double distance_to(std::span<const Point2> v, Point2 q) {
    if (v.size() >= 3 && fan_locate(v, q).inside) return 0.0;
    return distance(q, project(v, q));
}

bool contains(std::span<const Point2> v, Point2 q, double tol) {
    return distance_to(v, q) <= tol;
}

Chord chord(std::span<const Point2> v, Point2 through, Vec2 dir, double tol) {
    std::size_t n = v.size();
    if (n == 0) throw std::invalid_argument("chord on empty cycle");
    Vec2 nrm = dir.perp();
    auto sig = [&](Point2 p) { return nrm.dot(p - through); };
    auto onto_line = [&](Point2 p) { return p - nrm * sig(p); };

    std::vector<Point2> cand;
    if (n == 1) {
        if (std::abs(sig(v[0])) > tol) throw std::invalid_argument("line misses cycle");
        cand.push_back(onto_line(v[0]));
    } else if (n == 2) {
        double s0 = sig(v[0]), s1 = sig(v[1]);
        if (std::abs(s0) <= tol) cand.push_back(onto_line(v[0]));
        if (std::abs(s1) <= tol) cand.push_back(onto_line(v[1]));
        if (cand.empty()) {
            if (sgn(s0) * sgn(s1) >= 0) throw std::invalid_argument("line misses cycle");
            cand.push_back(v[0] + (v[1] - v[0]) * (s0 / (s0 - s1)));
        }
    } else {
        std::size_t hi = extreme_vertex(v, nrm), lo = extreme_vertex(v, -nrm);
        if (sig(v[hi]) < -tol || sig(v[lo]) > tol)
            throw std::invalid_argument("line misses cycle");
        // On each arc between the extremes the offset is monotone; collect
        // the on-line run or the single crossing edge near its zero.
        auto collect = [&](std::size_t from, std::size_t to, double flip) {
            std::size_t len = (to + n - from) % n;
            auto at = [&](std::size_t k) { return (from + k) % n; };
            auto s_at = [&](std::size_t k) { return flip * sig(v[at(k)]); };
            auto first_with = [&](double bound) {
                // first k in [0, len] with s_at(k) < bound, len + 1 if none
                std::size_t a = 0, b = len + 1;
                while (a < b) {
                    std::size_t m = (a + b) / 2;
                    if (m <= len && s_at(m) < bound)
                        b = m;
                    else
                        a = m + 1;
                }
                return a;
            };
            std::size_t below = first_with(-tol);
            std::size_t run =
                first_with(std::nextafter(tol, std::numeric_limits<double>::infinity()));
            if (run < below) {
                for (std::size_t k = run > 4 ? run - 4 : 0;
                     k < std::min(below + 4, len + 1); ++k)
                    if (std::abs(s_at(k)) <= tol) cand.push_back(onto_line(v[at(k)]));
            } else if (below <= len) {
                Point2 a = v[at(below - 1)], b = v[at(below)];
                double sa = sig(a), sb = sig(b);
                cand.push_back(a + (b - a) * (sa / (sa - sb)));
            }
        };
        collect(hi, lo, 1.0);
        collect(lo, hi, -1.0);
        if (cand.empty()) cand.push_back(onto_line(v[hi]));
    }

    auto along = [&](Point2 p) { return dir.dot(p - through); };
    Point2 a = cand[0], b = cand[0];
    for (const Point2& p : cand) {
        if (along(p) < along(a)) a = p;
        if (along(p) > along(b)) b = p;
    }
    return {a, b};
}

namespace {

void path_terms(std::span<const Point2> pts, double& perim, double& cross_sum) {
    perim = 0.0;
    cross_sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        perim += distance(pts[i], pts[i + 1]);
        cross_sum += pts[i].x * pts[i + 1].y - pts[i].y * pts[i + 1].x;
    }
}

ClipResult clip_small(std::vector<Point2>& verts, const HalfPlane& h, double tol,
                      ClipDelta* delta) {
    // Point or segment against a half-plane.
    double s0 = h.eval(verts[0]);
    double s1 = verts.size() == 2 ? h.eval(verts[1]) : s0;
    if (s0 <= tol && s1 <= tol) return ClipResult::untouched;
    if (s0 > tol && s1 > tol) {
        if (delta) path_terms(verts, delta->perim_removed, delta->cross_removed);
        if (delta && verts.size() == 2) {
            delta->perim_removed *= 2.0;
            delta->cross_removed += verts[1].x * verts[0].y - verts[1].y * verts[0].x;
        }
        verts.clear();
        return ClipResult::empty;
    }
    // Exactly one endpoint of a segment is beyond the cut.
    std::vector<Point2> out;
    auto keep = [&](Point2 p, double s) {
        if (s > tol) return;
        if (std::abs(s) <= tol) p = p - h.normal * h.eval(p);
        if (out.empty() || distance(out.back(), p) > 0.0) out.push_back(p);
    };
    keep(verts[0], s0);
    if (sgn(s0) * sgn(s1) < 0 && std::abs(s0) > tol && std::abs(s1) > tol) {
        Point2 c = verts[0] + (verts[1] - verts[0]) * (s0 / (s0 - s1));
        out.push_back(c - h.normal * h.eval(c));
    }
    keep(verts[1], s1);
    if (delta) {
        for (const Point2& p : out) {
            if (std::abs(h.eval(p)) > tol) continue;
            if (!delta->has_face) {
                delta->face = {p, p};
                delta->has_face = true;
            } else {
                delta->face.b = p;
            }
        }
    }
    if (delta) {
        double pr, cr, pa, ca;
        path_terms(verts, pr, cr);
        path_terms(out, pa, ca);
        if (verts.size() == 2) {
            pr *= 2.0;
            cr += verts[1].x * verts[0].y - verts[1].y * verts[0].x;
        }
        if (out.size() == 2) {
            pa *= 2.0;
            ca += out[1].x * out[0].y - out[1].y * out[0].x;
        }
        delta->perim_removed = pr;
        delta->cross_removed = cr;
        delta->perim_added = pa;
        delta->cross_added = ca;
    }
    verts = std::move(out);
    return ClipResult::cut;
}

}  // namespace

ClipResult clip_inplace(std::vector<Point2>& verts, const HalfPlane& h, double tol,
                        ClipDelta* delta) {
    if (delta) *delta = ClipDelta{};
    std::size_t n = verts.size();
    if (n == 0) throw std::invalid_argument("clip on empty cycle");
    if (n <= 2) return clip_small(verts, h, tol, delta);

    std::size_t seed = extreme_vertex(verts, h.normal);
    if (h.eval(verts[seed]) <= tol) return ClipResult::untouched;

    // Contiguous band of vertices with s > -tol around the seed.
    std::size_t L = seed, R = seed, band = 1;
    while (band < n && h.eval(verts[prev_idx(L, n)]) > -tol) {
        L = prev_idx(L, n);
        ++band;
    }
    if (band < n)
        while (h.eval(verts[next_idx(R, n)]) > -tol) {
            R = next_idx(R, n);
            ++band;
        }

    auto snap = [&](Point2 p) { return p - h.normal * h.eval(p); };
    if (band == n) {
        // No survivors; keep the extreme snapped points if any vertex is
        // within the tolerance slab, otherwise the cut empties the cycle.
        Vec2 along = h.normal.perp();
        Point2 a, b;
        bool any = false;
        for (const Point2& p : verts) {
            if (std::abs(h.eval(p)) > tol) continue;
            Point2 sp = snap(p);
            if (!any) {
                a = b = sp;
                any = true;
            } else {
                if (along.dot(sp - a) < 0.0) a = sp;
                if (along.dot(sp - b) > 0.0) b = sp;
            }
        }
        if (delta) {
            delta->perim_removed = perimeter(verts);
            double cr = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                Point2 p = verts[i], q = verts[next_idx(i, n)];
                cr += p.x * q.y - p.y * q.x;
            }
            delta->cross_removed = cr;
        }
        verts.clear();
        if (!any) return ClipResult::empty;
        verts.push_back(a);
        if (distance(a, b) > 0.0) verts.push_back(b);
        if (delta) {
            delta->perim_added = perimeter(verts);
            delta->cross_added = 0.0;
            delta->face = {a, b};
            delta->has_face = true;
        }
        return ClipResult::cut;
    }

    std::size_t u = prev_idx(L, n), w = next_idx(R, n);
    double sL = h.eval(verts[L]), sR = h.eval(verts[R]);
    Point2 pL = std::abs(sL) <= tol
                    ? snap(verts[L])
                    : snap(verts[u] + (verts[L] - verts[u]) *
                                          (h.eval(verts[u]) / (h.eval(verts[u]) - sL)));
    Point2 pR = std::abs(sR) <= tol
                    ? snap(verts[R])
                    : snap(verts[w] + (verts[R] - verts[w]) *
                                          (h.eval(verts[w]) / (h.eval(verts[w]) - sR)));
    std::vector<Point2> repl{pL};
    if (distance(pL, pR) > 0.0) repl.push_back(pR);

    if (delta) {
        delta->face = {pL, pR};
        delta->has_face = true;
    }
    if (delta) {
        std::vector<Point2> old_path{verts[u]};
        for (std::size_t i = L;; i = next_idx(i, n)) {
            old_path.push_back(verts[i]);
            if (i == R) break;
        }
        old_path.push_back(verts[w]);
        path_terms(old_path, delta->perim_removed, delta->cross_removed);
        std::vector<Point2> new_path{verts[u]};
        for (const Point2& p : repl) new_path.push_back(p);
        new_path.push_back(verts[w]);
        path_terms(new_path, delta->perim_added, delta->cross_added);
    }

    bool changed = band != repl.size();
    if (!changed) {
        std::size_t i = L;
        for (const Point2& p : repl) {
            if (!(verts[i] == p)) changed = true;
            i = next_idx(i, n);
        }
    }
    if (!changed) {
        if (delta) *delta = ClipDelta{};
        return ClipResult::untouched;
    }

    if (L <= R) {
        auto it = verts.begin() + static_cast<std::ptrdiff_t>(L);
        std::size_t keep = std::min(repl.size(), band);
        for (std::size_t k = 0; k < keep; ++k) *(it + static_cast<std::ptrdiff_t>(k)) = repl[k];
        if (band > keep)
            verts.erase(it + static_cast<std::ptrdiff_t>(keep),
                        it + static_cast<std::ptrdiff_t>(band));
        else if (repl.size() > keep)
            verts.insert(it + static_cast<std::ptrdiff_t>(keep), repl.begin() + 1,
                         repl.end());
    } else {
        // Band wraps the seam: [L, n) then [0, R].
        verts.erase(verts.begin() + static_cast<std::ptrdiff_t>(L), verts.end());
        verts.erase(verts.begin(), verts.begin() + static_cast<std::ptrdiff_t>(R) + 1);
        verts.insert(verts.end(), repl.begin(), repl.end());
    }
    return ClipResult::cut;
}

}  // namespace geo

ConvexPolygon convex_hull(std::vector<Point2> pts) {
    for (const Point2& p : pts)
        if (!is_finite(p)) throw std::invalid_argument("non-finite point");
    if (pts.empty()) throw std::invalid_argument("hull of no points");
    std::sort(pts.begin(), pts.end(),
              [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return ConvexPolygon::trusted(std::move(pts));
    std::vector<Point2> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && geo::cross3(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && geo::cross3(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return ConvexPolygon::trusted(std::move(h));
}

ConvexPolygon::ConvexPolygon(std::vector<Point2> vertices) {
    ConvexPolygon hull = convex_hull(vertices);  // validates finiteness too
    double tol = 1e-9 * std::max(1.0, geo::diameter(hull.verts_));
    std::size_t n = hull.verts_.size();
    for (const Point2& p : vertices) {
        double border = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            Point2 near = geo::project_point_segment(p, hull.verts_[i],
                                                     hull.verts_[(i + 1) % n]);
            border = std::min(border, distance(p, near));
        }
        if (border > tol)
            throw std::invalid_argument("vertices do not form a convex cycle");
    }
    verts_ = std::move(hull.verts_);
}

ConvexPolygon ConvexPolygon::trusted(std::vector<Point2> verts) {
    ConvexPolygon p;
    p.verts_ = std::move(verts);
    return p;
}

ConvexPolygon ConvexPolygon::rectangle(double x0, double y0, double x1, double y1) {
    return ConvexPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

ConvexPolygon ConvexPolygon::regular(int n, double circumradius, Point2 center,
                                     double phase) {
    if (n < 1) throw std::invalid_argument("regular polygon needs n >= 1");
    double pi = std::acos(-1.0);
    std::vector<Point2> v;
    v.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        double th = phase + 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
        v.push_back(center + Vec2{std::cos(th), std::sin(th)} * circumradius);
    }
    return ConvexPolygon(std::move(v));
}

std::optional<ConvexPolygon> ConvexPolygon::clip(const HalfPlane& h,
                                                 double snap_tol) const {
    ClipDelta unused;
    return clip(h, snap_tol, unused);
}

std::optional<ConvexPolygon> ConvexPolygon::clip(const HalfPlane& h, double snap_tol,
                                                 ClipDelta& delta) const {
    std::vector<Point2> v(verts_.begin(), verts_.end());
    if (geo::clip_inplace(v, h, snap_tol, &delta) == ClipResult::empty)
        return std::nullopt;
    return trusted(std::move(v));
}

double ConvexPolygon::default_snap_tol() const {
    return 1e-9 * std::max(1.0, diameter());
}

nlohmann::json ConvexPolygon::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const Point2& p : verts_) arr.push_back({p.x, p.y});
    return nlohmann::json{{"vertices", arr}};
}

ConvexPolygon ConvexPolygon::from_json(const nlohmann::json& j) {
    const nlohmann::json& arr = j.at("vertices");
    std::vector<Point2> v;
    v.reserve(arr.size());
    for (const auto& e : arr) v.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    return ConvexPolygon(std::move(v));
}

}  // namespace coco
