#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "certify.hpp"
#include "learner.hpp"
#include "oracles.hpp"
#include "rng.hpp"

using namespace coco;

namespace {

const double kPi = std::acos(-1.0);

Point2 random_point_in(const std::vector<Point2>& verts, Rng& rng) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const Point2& p : verts) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    for (int tries = 0; tries < 400; ++tries) {
        Point2 q{rng.uniform(x0, x1), rng.uniform(y0, y1)};
        if (oracle::inside_all_edges(verts, q)) return q;
    }
    return oracle::project_scan(verts, {rng.uniform(x0, x1), rng.uniform(y0, y1)});
}

StepRecord record_of(const StepGeometry& d, Point2 x, std::size_t t) {
    StepRecord r;
    r.t = t;
    r.x = x;
    r.proj = d.proj;
    r.chord_a = d.chord_a;
    r.chord_b = d.chord_b;
    r.p_norm = d.p_norm;
    r.w = d.w;
    r.w_a = d.w_a;
    r.w_b = d.w_b;
    r.delta_perim = d.delta_perim;
    r.delta_area = d.delta_area;
    r.violation = d.violation;
    r.active = d.active;
    return r;
}

}  // namespace

TEST_CASE("per-step slack formulas on hand numbers") {
    StepRecord d;
    d.p_norm = 1.0;
    d.w = 2.0;
    d.delta_area = 2.0;
    d.delta_perim = 2.0;
    d.active = true;
    CHECK(check_area_lemma(d) == 1.0);
    CHECK(check_perim_lemma(d) == doctest::Approx(2.0 - (std::sqrt(2.0) - 1.0)));

    // alpha = 1, D = 1: required level is 1/sqrt(3)
    StepRecord m;
    m.p_norm = 1.0;
    m.delta_perim = 0.6;
    m.delta_area = 0.7;
    CHECK(check_max_bound(m, 1.0, 1.0) ==
          doctest::Approx(0.7 - 1.0 / std::sqrt(3.0)));
    // alpha = 2/D at D = 1: level 1/sqrt(2)
    CHECK(check_max_bound(m, 2.0, 1.0) ==
          doctest::Approx(1.4 - 1.0 / std::sqrt(2.0)));

    StepRecord tangent;
    tangent.p_norm = 0.5;
    tangent.w = 0.0;
    tangent.delta_perim = 0.5;
    CHECK(check_perim_lemma(tangent) == 0.0);
}

TEST_CASE("equalizing width is the worst case of the max bound") {
    Rng rng(6021);
    for (int rep = 0; rep < 300; ++rep) {
        double D = rng.uniform(0.5, 8.0);
        double p = rng.uniform(1e-3, 1.0) * D;
        double alpha = rng.uniform(0.05, 5.0);
        double ws = 2.0 * std::sqrt(p / (alpha * (2.0 + alpha * p)));
        double perim_arm = std::hypot(p, 0.5 * ws) - 0.5 * ws;
        double area_arm = 0.5 * alpha * p * ws;
        CHECK(perim_arm == doctest::Approx(area_arm).epsilon(1e-10));
        double level = p * std::sqrt(p * alpha / (2.0 + alpha * p));
        CHECK(perim_arm == doctest::Approx(level).epsilon(1e-10));

        // grid over widths: the max of the two arms never dips below the
        // D-relaxed level used by check_max_bound
        double relaxed = p * std::sqrt(p * alpha / (D * alpha + 2.0));
        CHECK(level >= relaxed - 1e-12);
        for (int i = 0; i <= 200; ++i) {
            double w = 2.0 * D * i / 200.0;
            double arm = std::max(std::hypot(p, 0.5 * w) - 0.5 * w,
                                  0.5 * alpha * p * w);
            CHECK(arm >= relaxed - 1e-9);
        }
    }
}

TEST_CASE("live cuts satisfy slack floors and rebuild their constructions") {
    Rng rng(7301);
    int active_seen = 0;
    for (int rep = 0; rep < 120; ++rep) {
        std::vector<Point2> pts;
        int m = 5 + static_cast<int>(rng.below(30));
        for (int i = 0; i < m; ++i)
            pts.push_back({rng.uniform(-5, 5), rng.uniform(-5, 5)});
        ConvexPolygon domain = convex_hull(pts);
        if (domain.size() < 3) continue;
        NestedState st(domain);
        double D = domain.diameter();
        double scale = std::max(1.0, D);
        double alpha = 2.0 / D;

        for (int round = 1; round <= 40; ++round) {
            std::vector<Point2> prev = st.vertices();
            if (prev.size() < 3 || geo::diameter(prev) < 0.02 * scale) break;
            Point2 x = random_point_in(prev, rng);
            double th = rng.uniform(0.0, 2.0 * kPi);
            Vec2 n{std::cos(th), std::sin(th)};
            double lo = 1e300;
            for (const Point2& v : prev) lo = std::min(lo, n.dot({v.x, v.y}));
            double avail = n.dot({x.x, x.y}) - lo;
            double u = rng.uniform(0.0, 0.35) * avail;
            HalfPlane g(n, n.dot({x.x, x.y}) - u);

            StepGeometry d;
            try {
                d = st.reveal(g, x, true);
            } catch (const FeasibilityViolated&) {
                break;
            }
            if (!d.active) continue;
            ++active_seen;
            StepRecord rec = record_of(d, x, static_cast<std::size_t>(round));

            REQUIRE(check_area_lemma(rec) >= -1e-7 * scale);
            REQUIRE(check_perim_lemma(rec) >= -1e-7 * scale);
            REQUIRE(check_max_bound(rec, alpha, D) >= -1e-7 * scale);

            ConstructionCheck cc =
                check_proof_constructions(rec, prev, st.vertices());
            REQUIRE(cc.ok);
            REQUIRE(cc.supporting_ok);
            REQUIRE(cc.tri_area_err <= 1e-9);
            REQUIRE(cc.pyth_err_a <= 1e-9);
            REQUIRE(cc.pyth_err_b <= 1e-9);
            REQUIRE(cc.perim_diff_err <= 1e-9);
        }
    }
    CHECK(active_seen > 300);
}

TEST_CASE("rotating run passes every certificate flag") {
    ConvexPolygon box = ConvexPolygon::rectangle(-4, -4, 4, 4);
    Instance ins = gen_rotating_halfplanes(4096, box, 0.4, 2.0, 99);
    Trace tr = run(Learner::coco_ogd, default_config(ins), ins);
    CertificateReport rep = check_aggregates(tr, ins.D, ins.G);

    CHECK(rep.pass());
    CHECK(rep.alpha == doctest::Approx(2.0 / ins.D));
    std::size_t actives = 0;
    double sp = 0, sp32 = 0, sd = 0, sa = 0, cv = 0;
    for (const StepRecord& r : tr.rows) {
        if (r.active) ++actives;
        sp += r.p_norm;
        sp32 += r.p_norm * std::sqrt(r.p_norm);
        sd += r.delta_perim;
        sa += r.delta_area;
        cv += r.violation;
    }
    CHECK(rep.per_step.size() == actives);
    CHECK(rep.aggregate.sum_p == sp);
    CHECK(rep.aggregate.sum_p32 == sp32);
    CHECK(rep.aggregate.sum_delta == sd);
    CHECK(rep.aggregate.sum_Delta == sa);
    CHECK(rep.aggregate.ccv == cv);

    double tol = 1e-7 * std::max(1.0, ins.D);
    CHECK(std::abs(sd - (tr.initial_perimeter - tr.final_perimeter)) <= tol);
    CHECK(sd <= kPi * ins.D + 1e-6);
    CHECK(sa <= 0.25 * kPi * ins.D * ins.D + 1e-6);
    CHECK(sp32 <= 1.5 * std::sqrt(2.0) * kPi * std::pow(ins.D, 1.5) + 1e-6);
    CHECK(sp <= std::cbrt(4096.0) * std::pow(sp32, 2.0 / 3.0) + 1e-9);
    CHECK(cv <= violation_bound_constant() * ins.G * std::cbrt(4096.0) * ins.D + 1e-6);
    for (const StepCertificate& s : rep.per_step) {
        CHECK(s.area_lemma_slack >= -tol);
        CHECK(s.perim_lemma_slack >= -tol);
        CHECK(s.max_bound_slack >= -tol);
        CHECK(s.supporting_hp_ok);
    }
}

TEST_CASE("shrinking box run with heavy activity passes") {
    ConvexPolygon box = ConvexPolygon::rectangle(0, 0, 8, 8);
    Instance ins = gen_shrinking_box(8192, box, 3e-4, 1.0, 5);
    Trace tr = run(Learner::coco_ogd, default_config(ins), ins);
    CertificateReport rep = check_aggregates(tr, ins.D, ins.G);
    CHECK(rep.pass());
    CHECK(rep.per_step.size() > 3000);
    CHECK(rep.aggregate.ccv > 0.0);
}

TEST_CASE("tampered rows trip the matching flag") {
    ConvexPolygon box = ConvexPolygon::rectangle(-4, -4, 4, 4);
    Instance ins = gen_rotating_halfplanes(512, box, 0.5, 1.0, 17);
    Trace tr = run(Learner::coco_ogd, default_config(ins), ins);
    REQUIRE(check_aggregates(tr, ins.D, ins.G).pass());
    std::size_t k = 0;
    while (k < tr.rows.size() && !tr.rows[k].active) ++k;
    REQUIRE(k < tr.rows.size());

    Trace bad = tr;
    bad.rows[k].delta_area = 0.5 * bad.rows[k].p_norm * bad.rows[k].w - 0.5;
    CertificateReport r1 = check_aggregates(bad, ins.D, ins.G);
    CHECK(!r1.per_step_ok);
    CHECK(!r1.pass());

    bad = tr;
    bad.rows[k].p_norm *= 4.0;
    CertificateReport r2 = check_aggregates(bad, ins.D, ins.G);
    CHECK(!r2.per_step_ok);

    bad = tr;
    bad.rows[k].violation += 10.0;
    CertificateReport r3 = check_aggregates(bad, ins.D, ins.G);
    CHECK(!r3.aggregate.ccv_reduction_ok);
    CHECK(!r3.pass());
}

TEST_CASE("degenerate traces: empty sums pass, one step saturates Holder") {
    Trace empty;
    empty.initial_perimeter = empty.final_perimeter = 12.0;
    empty.initial_area = empty.final_area = 9.0;
    CertificateReport rep = check_aggregates(empty, 3.0, 1.0);
    CHECK(rep.pass());
    CHECK(rep.aggregate.sum_p == 0.0);
    CHECK(rep.aggregate.sum_delta == 0.0);
    CHECK(rep.per_step.empty());

    Trace one;
    one.initial_perimeter = 10.0;
    one.final_perimeter = 9.7;
    one.initial_area = 6.0;
    one.final_area = 5.2;
    one.final_set = {{-1.0, 0.7}, {1.0, 0.7}, {0.0, 1.5}};
    StepRecord r;
    r.t = 1;
    r.x = {0.0, 0.0};
    r.proj = {0.0, 0.7};
    r.chord_a = {-1.0, 0.7};
    r.chord_b = {1.0, 0.7};
    r.p_norm = 0.7;
    r.w = 2.0;
    r.w_a = r.w_b = 1.0;
    r.delta_perim = 0.3;
    r.delta_area = 0.8;
    r.violation = 0.6;
    r.active = true;
    one.rows = {r};
    CertificateReport rep1 = check_aggregates(one, 3.0, 1.0);
    CHECK(rep1.pass());
    double rhs = std::cbrt(1.0) * std::pow(rep1.aggregate.sum_p32, 2.0 / 3.0);
    CHECK(std::abs(rep1.aggregate.sum_p - rhs) <= 1e-12);
}

TEST_CASE("all-linear benchmark equals exhaustive vertex enumeration") {
    ConvexPolygon box = ConvexPolygon::rectangle(-4, -4, 4, 4);
    Instance ins = gen_rotating_halfplanes(512, box, 0.5, 1.5, 23);
    Trace tr = run(Learner::coco_ogd, default_config(ins), ins);
    RegretReport rep = offline_benchmark(ins, tr);

    double best = 1e300;
    Point2 arg{};
    for (const Point2& v : tr.final_set) {
        double total = 0.0;
        for (const LossSpec& f : ins.losses) total += loss_value(f, v);
        if (total < best) {
            best = total;
            arg = v;
        }
    }
    CHECK(rep.offline_cost == best);
    CHECK(rep.x_star == arg);

    double online = 0.0, cv = 0.0;
    for (const StepRecord& r : tr.rows) {
        online += r.loss;
        cv += r.violation;
    }
    CHECK(rep.online_cost == online);
    CHECK(rep.ccv == cv);
    CHECK(rep.regret == online - best);
    CHECK(rep.bound_ccv == 4.0 * ins.G * std::cbrt(512.0) * ins.D);
    CHECK(rep.bound_ccv_tight ==
          violation_bound_constant() * ins.G * std::cbrt(512.0) * ins.D);
    CHECK(geo::contains(tr.final_set, rep.x_star, 1e-9 * ins.D));
    CHECK(rep.converged);
}

TEST_CASE("constant-zero losses give zero regret") {
    ConvexPolygon box = ConvexPolygon::rectangle(0, 0, 4, 4);
    Instance ins = gen_static(16, box, AffineConstraint{{1.0, 0.0}, 3.5},
                              LinearLoss{{0.0, 0.0}});
    Trace tr = run(Learner::coco_ogd, default_config(ins), ins);
    RegretReport rep = offline_benchmark(ins, tr);
    CHECK(rep.online_cost == 0.0);
    CHECK(rep.offline_cost == 0.0);
    CHECK(rep.regret == 0.0);
}

TEST_CASE("projected descent matches a dense grid on mixed quadratic losses") {
    ConvexPolygon box = ConvexPolygon::rectangle(0, 0, 4, 4);
    std::size_t T = 24;
    Rng rng(314);
    std::vector<LossSpec> losses;
    for (std::size_t t = 0; t < T; ++t) {
        if (t % 6 == 5) {
            losses.push_back(LinearLoss{{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)}});
        } else {
            losses.push_back(QuadraticLoss{
                {rng.uniform(0.6, 3.0), rng.uniform(0.6, 3.0)}, 1.0, 1.0});
        }
    }
    std::vector<ConstraintSpec> cons(T, AffineConstraint{{1.0, 0.0}, 3.5});
    Instance ins{box,
                 ConvexPolygon::rectangle(0, 0, 3.5, 4),
                 T,
                 1.0,
                 box.diameter(),
                 0,
                 "static",
                 nlohmann::json::object(),
                 losses,
                 cons};
    certify_instance(ins, 1e-7 * std::max(1.0, ins.D));
    Trace tr = run(Learner::coco_ogd, default_config(ins), ins);

    RegretReport rep = offline_benchmark(ins, tr);
    CHECK(rep.converged);
    CHECK(geo::contains(tr.final_set, rep.x_star, 1e-9 * ins.D));

    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const Point2& p : tr.final_set) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    int n = 800;
    double grid_best = 1e300;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            Point2 q{x0 + (x1 - x0) * i / n, y0 + (y1 - y0) * j / n};
            if (!geo::contains(tr.final_set, q, 0.0)) continue;
            double total = 0.0;
            for (const LossSpec& f : ins.losses) total += loss_value(f, q);
            grid_best = std::min(grid_best, total);
        }
    }
    CHECK(rep.offline_cost <= grid_best + 1e-9);
    CHECK(grid_best - rep.offline_cost <= 1e-3);

    RegretReport coarse = offline_benchmark(ins, tr, 60);
    RegretReport fine = offline_benchmark(ins, tr, 200000);
    CHECK(fine.offline_cost <= coarse.offline_cost + 1e-12);
}

TEST_CASE("reports serialize with their numbers") {
    ConvexPolygon box = ConvexPolygon::rectangle(-4, -4, 4, 4);
    Instance ins = gen_rotating_halfplanes(256, box, 0.5, 1.0, 7);
    Trace tr = run(Learner::coco_ogd, default_config(ins), ins);
    CertificateReport rep = check_aggregates(tr, ins.D, ins.G);
    nlohmann::json j = rep.to_json();
    CHECK(j["aggregate"]["sum_p"].get<double>() == rep.aggregate.sum_p);
    CHECK(j["aggregate"]["theorem_ok"].get<bool>() == rep.aggregate.theorem_ok);
    CHECK(j["per_step"].size() == rep.per_step.size());
    CHECK(j["alpha"].get<double>() == rep.alpha);
    CHECK(j["pass"].get<bool>() == rep.pass());

    RegretReport rr = offline_benchmark(ins, tr);
    nlohmann::json jr = rr.to_json();
    CHECK(jr["x_star"][0].get<double>() == rr.x_star.x);
    CHECK(jr["regret"].get<double>() == rr.regret);
    CHECK(jr["converged"].get<bool>() == rr.converged);
}
