#pragma once

// Numerical certificates over a recorded trace: per-step decrease
// inequalities for the cut geometry, aggregate budget and chain
// inequalities, and the comparison against the best fixed feasible action
// in hindsight.

#include <cstddef>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "instance.hpp"
#include "learner.hpp"

namespace coco {

// Slacks are measured quantity minus required lower bound; negative past
// the tolerance floor means the inequality failed.
struct StepCertificate {
    std::size_t t = 0;
    double area_lemma_slack = 0.0;   // delta_area - p w / 2
    double perim_lemma_slack = 0.0;  // delta_perim - (sqrt(p^2 + w^2/4) - w/2)
    double max_bound_slack = 0.0;    // max(delta_perim, alpha delta_area)
                                     //   - p^{3/2} sqrt(alpha / (D alpha + 2))
    bool supporting_hp_ok = true;    // chord endpoints on the separating line,
                                     // terminal set beyond it, action behind it
};

struct AggregateCertificate {
    double sum_p32 = 0.0;    // sum of p_norm^{3/2}
    double sum_p = 0.0;
    double sum_delta = 0.0;  // total perimeter decrease
    double sum_Delta = 0.0;  // total area decrease
    double ccv = 0.0;        // sum of positive violations
    bool perim_budget_ok = true;   // telescopes and stays under pi D
    bool area_budget_ok = true;    // telescopes and stays under (pi/4) D^2
    bool p32_budget_ok = true;     // sum_p32 <= (3/2) sqrt(2) pi D^{3/2}
    bool holder_ok = true;         // sum_p <= T^{1/3} sum_p32^{2/3}
    bool ccv_reduction_ok = true;  // ccv <= G sum_p
    bool theorem_ok = true;        // ccv <= (3/2 sqrt(2) pi)^{2/3} G T^{1/3} D
};

struct CertificateReport {
    std::vector<StepCertificate> per_step;  // active steps only
    AggregateCertificate aggregate;
    double alpha = 0.0;
    double tol = 0.0;         // slack floor applied per step
    bool per_step_ok = true;  // every slack >= -tol and every supporting flag

    bool pass() const;
    nlohmann::json to_json() const;
};

// (3/2 sqrt(2) pi)^{2/3}, the constant of the cubic-root violation bound.
double violation_bound_constant();

double check_area_lemma(const StepRecord& d);
double check_perim_lemma(const StepRecord& d);
double check_max_bound(const StepRecord& d, double alpha, double D);

// Rebuilds the cut construction behind one active step from the previous
// set: the triangle (x, a, b) against p w / 2, the two right-triangle
// hypotenuses from x to the chord endpoints, and the perimeter difference
// between hull(U + {x}) and U, the part of the previous set beyond the
// separating line. Errors are absolute; ok=false if the rebuild failed.
struct ConstructionCheck {
    bool ok = true;
    bool supporting_ok = true;  // every vertex of the next set beyond the line
    double tri_area_err = 0.0;
    double pyth_err_a = 0.0;
    double pyth_err_b = 0.0;
    double perim_diff_err = 0.0;
};
ConstructionCheck check_proof_constructions(const StepRecord& d,
                                            std::span<const Point2> S_prev,
                                            std::span<const Point2> S_curr);

// Evaluates every certificate over a trace. alpha <= 0 selects 2/D. The
// per-step slack floor is -tol_base * max(1, D); telescoping identities use
// the same scaled tolerance; budget and theorem checks allow 1e-6 absolute
// and the Holder chain 1e-9.
CertificateReport check_aggregates(const Trace& trace, double D, double G,
                                   double alpha = 0.0, double tol_base = 1e-7);

struct RegretReport {
    Point2 x_star{};
    double offline_cost = 0.0;
    double online_cost = 0.0;
    double regret = 0.0;  // online_cost - offline_cost
    double ccv = 0.0;
    double bound_ccv = 0.0;        // 4 G T^{1/3} D
    double bound_ccv_tight = 0.0;  // (3/2 sqrt(2) pi)^{2/3} G T^{1/3} D
    bool converged = true;

    nlohmann::json to_json() const;
};

// Best fixed action over the terminal feasible set: exact vertex selection
// when every loss is linear, otherwise projected gradient descent on the
// summed loss, multi-started from every vertex and the vertex mean, run
// until the gradient mapping norm falls below 1e-9 or the per-start cap is
// hit. converged=false flags that no start met the tolerance; the best
// point found is still reported, and the reported cost never increases when
// the cap grows.
RegretReport offline_benchmark(const Instance& ins, const Trace& trace,
                               std::size_t iter_cap = 200000);

}  // namespace coco
