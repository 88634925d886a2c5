#pragma once

// Online learners over a problem instance: the double-projection gradient
// method and two baselines, executed round by round to produce a trace of
// per-step diagnostics.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "constraint_state.hpp"
#include "geometry.hpp"
#include "instance.hpp"

namespace coco {

// The revealed gradient exceeds the Lipschitz bound the learner was
// configured with; the instance breaks its own contract.
class GradientTooLarge : public std::runtime_error {
public:
    GradientTooLarge(double norm, double bound);
};

enum class StepRule { paper };  // eta_t = D / (G sqrt(t))

struct LearnerConfig {
    double D = 1.0;
    double G = 1.0;
    Point2 x_init{};
    StepRule step_rule = StepRule::paper;
};

double step_size(const LearnerConfig& cfg, std::size_t t);

struct LearnerState {
    Point2 x{};
    Point2 y{};
    std::size_t t = 1;
};

// One double-projection update on explicit polygons:
//   y <- P_{S_prev}(x - eta_t * grad), x <- P_{S_curr}(y), t <- t + 1.
// Reference form; run() below is the fast equivalent loop.
LearnerState coco_step(const LearnerConfig& cfg, const LearnerState& state, Vec2 grad,
                       const ConvexPolygon& S_prev, const ConvexPolygon& S_curr);

enum class Learner { coco_ogd, unconstrained_ogd, lazy_feasible };

const char* learner_name(Learner k);
Learner learner_from_name(const std::string& name);

struct StepRecord {
    std::size_t t = 0;
    Point2 x{};
    Point2 proj{};
    Point2 chord_a{};
    Point2 chord_b{};
    double p_norm = 0.0;
    double w = 0.0;
    double w_a = 0.0;
    double w_b = 0.0;
    double delta_perim = 0.0;
    double delta_area = 0.0;
    double violation = 0.0;
    double loss = 0.0;
    bool active = false;
};

struct Trace {
    std::string learner;
    std::string instance;
    std::uint64_t seed = 0;
    LearnerConfig cfg;
    double initial_perimeter = 0.0;
    double initial_area = 0.0;
    double final_perimeter = 0.0;
    double final_area = 0.0;
    std::vector<Point2> final_set;  // S_T
    std::vector<StepRecord> rows;
};

// D and G from the instance, starting at the vertex mean of the domain.
LearnerConfig default_config(const Instance& ins);

// Plays the learner against the instance for all T rounds.
//   coco_ogd           the double-projection method
//   unconstrained_ogd  projects only onto the domain, ignoring constraints
//   lazy_feasible      no gradient step, chases feasibility by projection
// Throws FeasibilityViolated if the constraints empty the feasible set and
// GradientTooLarge on a gradient past G * (1 + 1e-6).
Trace run(Learner kind, const LearnerConfig& cfg, const Instance& ins);

}  // namespace coco
