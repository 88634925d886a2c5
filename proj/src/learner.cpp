#include "learner.hpp"

#include <cmath>

namespace coco {

GradientTooLarge::GradientTooLarge(double norm, double bound)
    : std::runtime_error("gradient norm " + std::to_string(norm) +
                         " exceeds the Lipschitz bound " + std::to_string(bound)) {}

double step_size(const LearnerConfig& cfg, std::size_t t) {
    return cfg.D / (cfg.G * std::sqrt(static_cast<double>(t)));
}

LearnerState coco_step(const LearnerConfig& cfg, const LearnerState& state, Vec2 grad,
                       const ConvexPolygon& S_prev, const ConvexPolygon& S_curr) {
    double gn = grad.norm();
    if (gn > cfg.G * (1.0 + 1e-6)) throw GradientTooLarge(gn, cfg.G);
    LearnerState next;
    next.y = S_prev.project(state.x - grad * step_size(cfg, state.t));
    next.x = S_curr.project(next.y);
    next.t = state.t + 1;
    return next;
}

const char* learner_name(Learner k) {
    switch (k) {
        case Learner::coco_ogd: return "CocoOGD";
        case Learner::unconstrained_ogd: return "UnconstrainedOGD";
        case Learner::lazy_feasible: return "LazyFeasible";
    }
    return "?";
}

Learner learner_from_name(const std::string& name) {
    if (name == "CocoOGD") return Learner::coco_ogd;
    if (name == "UnconstrainedOGD") return Learner::unconstrained_ogd;
    if (name == "LazyFeasible") return Learner::lazy_feasible;
    throw std::invalid_argument("unknown learner: " + name);
}

LearnerConfig default_config(const Instance& ins) {
    return {ins.D, ins.G, geo::vertex_mean(ins.domain.vertices()), StepRule::paper};
}

Trace run(Learner kind, const LearnerConfig& cfg, const Instance& ins) {
    if (ins.losses.size() != ins.T || ins.constraints.size() != ins.T)
        throw std::invalid_argument("instance sequences do not match the horizon");
    NestedState st(ins.domain);
    if (!ins.domain.contains(cfg.x_init, st.snap_tol()))
        throw std::invalid_argument("initial action lies outside the domain");
    double grad_cap = cfg.G * (1.0 + 1e-6);

    Trace tr;
    tr.learner = learner_name(kind);
    tr.instance = instance_id(ins);
    tr.seed = ins.seed;
    tr.cfg = cfg;
    tr.initial_perimeter = st.perimeter_exact();
    tr.initial_area = st.area_exact();
    tr.rows.reserve(ins.T);

    Point2 x = cfg.x_init;
    for (std::size_t t = 1; t <= ins.T; ++t) {
        const LossSpec& f = ins.losses[t - 1];
        const ConstraintSpec& g = ins.constraints[t - 1];

        double fval = loss_value(f, x);
        double gval = constraint_value(g, x);

        Vec2 grad = kind == Learner::lazy_feasible ? Vec2{} : loss_grad(f, x);
        double gn = grad.norm();
        if (gn > grad_cap) throw GradientTooLarge(gn, cfg.G);

        // the gradient step projects onto S_{t-1}, before this round's cut
        Point2 z = x - grad * step_size(cfg, t);
        bool member = kind != Learner::unconstrained_ogd;
        Point2 y = member ? st.project(z) : geo::project(ins.domain.vertices(), z);

        StepGeometry sg;
        if (const auto* a = std::get_if<AffineConstraint>(&g)) {
            sg = st.reveal(cut_of(*a), x, member);
        } else {
            sg = st.reveal_polytope(std::get<SetConstraint>(g).target.vertices(), x,
                                    member, gval);
        }

        tr.rows.push_back({t, x, sg.proj, sg.chord_a, sg.chord_b, sg.p_norm, sg.w,
                           sg.w_a, sg.w_b, sg.delta_perim, sg.delta_area,
                           std::max(0.0, gval), fval, sg.active});

        x = member ? st.advance_member(y) : y;
    }
    tr.final_perimeter = st.perimeter_exact();
    tr.final_area = st.area_exact();
    tr.final_set = st.vertices();
    return tr;
}

}  // namespace coco
