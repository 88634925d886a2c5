#include "instance.hpp"

#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace coco {

namespace {

const double kPi = std::acos(-1.0);
const double kGoldenStep = kPi * (std::sqrt(5.0) - 1.0) / 2.0;
constexpr int kKernelSides = 64;

Vec2 unit(double theta) { return {std::cos(theta), std::sin(theta)}; }

HalfPlane outward_edge(Point2 a, Point2 b) {
    return HalfPlane::through(a, -((b - a).perp()));
}

nlohmann::json point_json(Point2 p) { return nlohmann::json::array({p.x, p.y}); }

Point2 point_from(const nlohmann::json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

nlohmann::json loss_json(const LossSpec& f) {
    if (const auto* l = std::get_if<LinearLoss>(&f))
        return {{"kind", "linear"}, {"c", point_json({l->c.x, l->c.y})}};
    const auto& q = std::get<QuadraticLoss>(f);
    return {{"kind", "quadratic"},
            {"center", point_json(q.center)},
            {"curvature", q.curvature},
            {"clip", q.clip}};
}

LossSpec loss_from(const nlohmann::json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear") {
        Point2 c = point_from(j.at("c"));
        return LinearLoss{{c.x, c.y}};
    }
    if (kind == "quadratic") {
        return QuadraticLoss{point_from(j.at("center")), j.at("curvature").get<double>(),
                             j.at("clip").get<double>()};
    }
    throw std::runtime_error("unknown loss kind: " + kind);
}

nlohmann::json constraint_json(const ConstraintSpec& g) {
    if (const auto* a = std::get_if<AffineConstraint>(&g))
        return {{"kind", "affine"},
                {"normal", point_json({a->normal.x, a->normal.y})},
                {"offset", a->offset}};
    const auto& s = std::get<SetConstraint>(g);
    return {{"kind", "set_distance"},
            {"target", s.target.to_json()},
            {"lipschitz", s.lipschitz}};
}

ConstraintSpec constraint_from(const nlohmann::json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "affine") {
        Point2 n = point_from(j.at("normal"));
        return AffineConstraint{{n.x, n.y}, j.at("offset").get<double>()};
    }
    if (kind == "set_distance") {
        return SetConstraint{ConvexPolygon::from_json(j.at("target")),
                             j.at("lipschitz").get<double>()};
    }
    throw std::runtime_error("unknown constraint kind: " + kind);
}

}  // namespace

double loss_value(const LossSpec& f, Point2 x) {
    if (const auto* l = std::get_if<LinearLoss>(&f)) return l->c.dot({x.x, x.y});
    const auto& q = std::get<QuadraticLoss>(f);
    double r = distance(x, q.center);
    double rc = q.clip / q.curvature;
    if (r <= rc) return 0.5 * q.curvature * r * r;
    return q.clip * (r - 0.5 * rc);
}

Vec2 loss_grad(const LossSpec& f, Point2 x) {
    if (const auto* l = std::get_if<LinearLoss>(&f)) return l->c;
    const auto& q = std::get<QuadraticLoss>(f);
    Vec2 d = x - q.center;
    double r = d.norm();
    double rc = q.clip / q.curvature;
    if (r <= rc) return d * q.curvature;
    return d * (q.clip / r);
}

double constraint_value(const ConstraintSpec& g, Point2 x) {
    if (const auto* a = std::get_if<AffineConstraint>(&g))
        return a->normal.dot({x.x, x.y}) - a->offset;
    const auto& s = std::get<SetConstraint>(g);
    return s.lipschitz * s.target.distance_to(x);
}

HalfPlane cut_of(const AffineConstraint& g) { return HalfPlane(g.normal, g.offset); }

std::string instance_id(const Instance& ins) {
    return ins.generator + "-T" + std::to_string(ins.T) + "-s" + std::to_string(ins.seed);
}

Instance gen_rotating_halfplanes(std::size_t T, const ConvexPolygon& domain,
                                 double kernel_radius, double G, std::uint64_t seed) {
    if (T == 0) throw std::invalid_argument("horizon must be positive");
    if (kernel_radius <= 0.0 || G <= 0.0)
        throw std::invalid_argument("kernel radius and Lipschitz bound must be positive");
    std::span<const Point2> vs = domain.vertices();
    if (vs.size() < 3) throw std::invalid_argument("domain must have nonempty interior");

    double D = domain.diameter();
    Point2 c = geo::vertex_mean(vs);
    double fit_tol = 1e-9 * std::max(1.0, D);
    for (std::size_t i = 0; i < vs.size(); ++i) {
        HalfPlane edge = outward_edge(vs[i], vs[(i + 1) % vs.size()]);
        if (edge.eval(c) > -kernel_radius + fit_tol)
            throw std::invalid_argument("kernel disk does not fit in the domain");
    }

    Rng rng(seed);
    double theta0 = rng.uniform(0.0, 2.0 * kPi);

    Instance ins{domain,
                 ConvexPolygon::regular(kKernelSides, kernel_radius, c),
                 T,
                 G,
                 D,
                 seed,
                 "rotating_halfplanes",
                 {{"kernel_radius", kernel_radius}},
                 {},
                 {}};
    ins.losses.reserve(T);
    ins.constraints.reserve(T);
    for (std::size_t t = 1; t <= T; ++t) {
        Vec2 u = unit(theta0 + static_cast<double>(t) * kGoldenStep);
        Vec2 u_next = unit(theta0 + static_cast<double>(t + 1) * kGoldenStep);
        ins.constraints.push_back(
            AffineConstraint{u * G, G * (u.dot({c.x, c.y}) + kernel_radius)});
        ins.losses.push_back(LinearLoss{-(u_next * G)});
    }
    certify_instance(ins, fit_tol);
    return ins;
}

Instance gen_shrinking_box(std::size_t T, const ConvexPolygon& domain,
                           double shrink_rate, double G, std::uint64_t seed) {
    if (T == 0) throw std::invalid_argument("horizon must be positive");
    if (!(shrink_rate > 0.0 && shrink_rate < 1.0))
        throw std::invalid_argument("shrink rate must lie in (0,1)");
    if (G <= 0.0) throw std::invalid_argument("Lipschitz bound must be positive");

    std::span<const Point2> vs = domain.vertices();
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const Point2& p : vs) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    double D = domain.diameter();
    double fit_tol = 1e-9 * std::max(1.0, D);
    if (x1 - x0 < 4.0 * fit_tol || y1 - y0 < 4.0 * fit_tol)
        throw std::invalid_argument("domain must have nonempty interior");

    double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    double qx = 0.25 * (x1 - x0) / 2.0, qy = 0.25 * (y1 - y0) / 2.0;
    std::vector<Point2> kern{{cx - qx, cy - qy}, {cx + qx, cy - qy},
                             {cx + qx, cy + qy}, {cx - qx, cy + qy}};
    for (std::size_t i = 0; i < vs.size(); ++i) {
        geo::clip_inplace(kern, outward_edge(vs[i], vs[(i + 1) % vs.size()]), fit_tol);
        if (kern.size() < 3)
            throw std::invalid_argument("kernel box does not fit in the domain");
    }

    // kernel sides and initial bounding-box sides, in cycle order
    // (+x, +y, -x, -y)
    const double ks[4] = {cx + qx, cy + qy, cx - qx, cy - qy};
    const double bs[4] = {x1, y1, x0, y0};
    const Vec2 ns[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

    // fixed loss direction, kept away from the axes so the iterate pins to a
    // corner of the box and the two corner sides stay active as they march
    Rng rng(seed);
    double phi0 = static_cast<double>(rng.below(4)) * (kPi / 2.0) +
                  rng.uniform(0.1, kPi / 2.0 - 0.1);
    Vec2 push = unit(phi0);
    double rho = 1.0 - shrink_rate;

    Instance ins{domain,
                 ConvexPolygon::trusted(std::move(kern)),
                 T,
                 G,
                 D,
                 seed,
                 "shrinking_box",
                 {{"shrink_rate", shrink_rate}},
                 {},
                 {}};
    ins.losses.reserve(T);
    ins.constraints.reserve(T);
    for (std::size_t t = 1; t <= T; ++t) {
        int s = static_cast<int>((t - 1) % 4);
        double k = std::floor(static_cast<double>(t - 1) / 4.0);
        double side = ks[s] + (bs[s] - ks[s]) * std::pow(rho, k + 1.0);
        // g(x) = G * (n . x - side * sign), written with normal of norm G
        double sign = (s < 2) ? 1.0 : -1.0;
        ins.constraints.push_back(AffineConstraint{ns[s] * G, G * side * sign});
        ins.losses.push_back(LinearLoss{-(push * G)});
    }
    certify_instance(ins, fit_tol);
    return ins;
}

Instance gen_static(std::size_t T, const ConvexPolygon& domain,
                    const ConstraintSpec& one_constraint, const LossSpec& one_loss) {
    if (T == 0) throw std::invalid_argument("horizon must be positive");
    double D = domain.diameter();
    double fit_tol = 1e-9 * std::max(1.0, D);

    std::vector<Point2> kern;
    if (const auto* a = std::get_if<AffineConstraint>(&one_constraint)) {
        kern.assign(domain.vertices().begin(), domain.vertices().end());
        geo::clip_inplace(kern, cut_of(*a), fit_tol);
    } else {
        const auto& s = std::get<SetConstraint>(one_constraint);
        kern.assign(s.target.vertices().begin(), s.target.vertices().end());
        std::span<const Point2> vs = domain.vertices();
        for (std::size_t i = 0; i < vs.size() && !kern.empty(); ++i)
            geo::clip_inplace(kern, outward_edge(vs[i], vs[(i + 1) % vs.size()]), fit_tol);
    }
    if (kern.empty())
        throw std::invalid_argument("constraint leaves no feasible kernel in the domain");

    double g_lip = std::holds_alternative<AffineConstraint>(one_constraint)
                       ? std::get<AffineConstraint>(one_constraint).normal.norm()
                       : std::get<SetConstraint>(one_constraint).lipschitz;
    double f_lip = std::holds_alternative<LinearLoss>(one_loss)
                       ? std::get<LinearLoss>(one_loss).c.norm()
                       : std::get<QuadraticLoss>(one_loss).clip;

    Instance ins{domain,
                 ConvexPolygon::trusted(std::move(kern)),
                 T,
                 std::max(g_lip, f_lip),
                 D,
                 0,
                 "static",
                 {{"constraint", constraint_json(one_constraint)},
                  {"loss", loss_json(one_loss)}},
                 std::vector<LossSpec>(T, one_loss),
                 std::vector<ConstraintSpec>(T, one_constraint)};
    certify_instance(ins, fit_tol);
    return ins;
}

void certify_instance(const Instance& ins, double tol) {
    if (ins.losses.size() != ins.T || ins.constraints.size() != ins.T)
        throw std::runtime_error("instance sequences do not match the horizon");
    if (ins.kernel.size() == 0) throw std::runtime_error("instance kernel is empty");
    double lip_tol = ins.G * (1.0 + 1e-9);
    for (const Point2& v : ins.kernel.vertices())
        if (!ins.domain.contains(v, tol))
            throw std::runtime_error("kernel leaves the domain");
    for (std::size_t i = 0; i < ins.T; ++i) {
        for (const Point2& v : ins.kernel.vertices())
            if (constraint_value(ins.constraints[i], v) > tol)
                throw std::runtime_error("kernel violates constraint at round " +
                                         std::to_string(i + 1));
        if (const auto* a = std::get_if<AffineConstraint>(&ins.constraints[i])) {
            if (a->normal.norm() > lip_tol)
                throw std::runtime_error("constraint slope exceeds the Lipschitz bound");
        } else if (std::get<SetConstraint>(ins.constraints[i]).lipschitz > lip_tol) {
            throw std::runtime_error("constraint slope exceeds the Lipschitz bound");
        }
        if (const auto* l = std::get_if<LinearLoss>(&ins.losses[i])) {
            if (l->c.norm() > lip_tol)
                throw std::runtime_error("loss slope exceeds the Lipschitz bound");
        } else {
            const auto& q = std::get<QuadraticLoss>(ins.losses[i]);
            if (!(q.curvature > 0.0) || q.clip > lip_tol)
                throw std::runtime_error("loss slope exceeds the Lipschitz bound");
        }
    }
}

nlohmann::json instance_to_json(const Instance& ins, bool materialize) {
    nlohmann::json j{{"generator", ins.generator}, {"T", ins.T},
                     {"G", ins.G},                 {"D", ins.D},
                     {"seed", ins.seed},           {"domain", ins.domain.to_json()},
                     {"kernel", ins.kernel.to_json()}, {"params", ins.params}};
    if (materialize) {
        nlohmann::json ls = nlohmann::json::array(), cs = nlohmann::json::array();
        for (const LossSpec& f : ins.losses) ls.push_back(loss_json(f));
        for (const ConstraintSpec& g : ins.constraints) cs.push_back(constraint_json(g));
        j["losses"] = std::move(ls);
        j["constraints"] = std::move(cs);
    }
    return j;
}

Instance instance_from_json(const nlohmann::json& j) {
    std::string gen = j.at("generator").get<std::string>();
    ConvexPolygon domain = ConvexPolygon::from_json(j.at("domain"));
    std::size_t T = j.at("T").get<std::size_t>();
    double G = j.at("G").get<double>();
    std::uint64_t seed = j.at("seed").get<std::uint64_t>();
    const nlohmann::json& params = j.at("params");

    if (j.contains("losses") && j.contains("constraints")) {
        Instance ins{domain,
                     ConvexPolygon::from_json(j.at("kernel")),
                     T,
                     G,
                     j.at("D").get<double>(),
                     seed,
                     gen,
                     params,
                     {},
                     {}};
        for (const nlohmann::json& f : j.at("losses")) ins.losses.push_back(loss_from(f));
        for (const nlohmann::json& g : j.at("constraints"))
            ins.constraints.push_back(constraint_from(g));
        certify_instance(ins, 1e-7 * std::max(1.0, ins.D));
        return ins;
    }
    if (gen == "rotating_halfplanes")
        return gen_rotating_halfplanes(T, domain, params.at("kernel_radius").get<double>(),
                                       G, seed);
    if (gen == "shrinking_box")
        return gen_shrinking_box(T, domain, params.at("shrink_rate").get<double>(), G,
                                 seed);
    if (gen == "static")
        return gen_static(T, domain, constraint_from(params.at("constraint")),
                          loss_from(params.at("loss")));
    throw std::runtime_error("unknown generator: " + gen);
}

}  // namespace coco
