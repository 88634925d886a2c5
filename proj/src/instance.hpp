#pragma once

// Problem instances for the constrained online protocol: a horizon of loss
// and constraint specifications over a polygonal domain, together with a
// certified kernel polygon contained in every constraint's feasible region.

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "geometry.hpp"

namespace coco {

// f(x) = c . x
struct LinearLoss {
    Vec2 c{};
};

// Quadratic bowl around `center` whose gradient is clipped to norm <= clip,
// which makes the value the Huber envelope: quadratic within radius
// clip/curvature, linear with slope `clip` beyond it. Convex, differentiable,
// clip-Lipschitz everywhere.
struct QuadraticLoss {
    Point2 center{};
    double curvature = 1.0;
    double clip = 1.0;
};

using LossSpec = std::variant<LinearLoss, QuadraticLoss>;

double loss_value(const LossSpec& f, Point2 x);
Vec2 loss_grad(const LossSpec& f, Point2 x);

// g(x) = normal . x - offset; the normal need not be unit length.
struct AffineConstraint {
    Vec2 normal{};
    double offset = 0.0;
};

// g(x) = lipschitz * dist(x, target); feasible region is the target itself.
struct SetConstraint {
    ConvexPolygon target;
    double lipschitz = 1.0;
};

using ConstraintSpec = std::variant<AffineConstraint, SetConstraint>;

double constraint_value(const ConstraintSpec& g, Point2 x);

// Unit-normalized half-plane with the same feasible region.
HalfPlane cut_of(const AffineConstraint& g);

struct Instance {
    ConvexPolygon domain;
    ConvexPolygon kernel;
    std::size_t T = 0;
    double G = 1.0;
    double D = 0.0;
    std::uint64_t seed = 0;
    std::string generator;
    nlohmann::json params;
    std::vector<LossSpec> losses;
    std::vector<ConstraintSpec> constraints;
};

std::string instance_id(const Instance& ins);

// Tangent lines to the disk of kernel_radius around the vertex mean of the
// domain, with the normal direction advancing by pi*(sqrt(5)-1)/2 per round;
// linear losses drive the next iterate across the upcoming cut. The kernel is
// a 64-gon inscribed in the disk.
Instance gen_rotating_halfplanes(std::size_t T, const ConvexPolygon& domain,
                                 double kernel_radius, double G, std::uint64_t seed);

// Axis-aligned sides of the domain's bounding box march geometrically inward
// toward a fixed central box (one side per round, cycling), while a fixed
// diagonal loss pins the iterate to a corner of the moving box. Violations
// track the side movements, so cumulative violation stays bounded in T while
// active rounds keep occurring for as long as the movements stay resolvable.
Instance gen_shrinking_box(std::size_t T, const ConvexPolygon& domain,
                           double shrink_rate, double G, std::uint64_t seed);

// The same constraint and loss every round.
Instance gen_static(std::size_t T, const ConvexPolygon& domain,
                    const ConstraintSpec& one_constraint, const LossSpec& one_loss);

// Checks kernel containment in every constraint (vertex slacks <= tol) and
// that declared Lipschitz data does not exceed G. Throws std::runtime_error
// with a description on the first failure.
void certify_instance(const Instance& ins, double tol);

// materialize=false stores only (generator, params, seed) and re-derives the
// sequences on load; materialize=true also embeds the full sequences.
nlohmann::json instance_to_json(const Instance& ins, bool materialize = false);
Instance instance_from_json(const nlohmann::json& j);

}  // namespace coco
