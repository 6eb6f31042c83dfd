#pragma once

// Scalar objectives on a design vector. Functions taking a `VecX* grad`
// accumulate their gradient into it (callers zero it first).

#include "spi2/problem.hpp"

namespace spi2 {

/// sum over all route segments of |segment|^2.
double routing_length_sq(const WorldFrame& frame, VecX* grad = nullptr);
double routing_length_sq(const VecX& x, const ProblemSpec& spec, VecX* grad = nullptr);

/// sum of segment lengths; reporting only.
double routing_length_linear(const WorldFrame& frame);
double routing_length_linear(const VecX& x, const ProblemSpec& spec);

/// Exponent arguments gamma |segment|^2 are capped here.
inline constexpr double kExponentCap = 60.0;

/// sum over segments of exp(gamma |segment|^2) - 1.
double routing_exponential(const WorldFrame& frame, double gamma, VecX* grad = nullptr);
double routing_exponential(const VecX& x, const ProblemSpec& spec, double gamma,
                           VecX* grad = nullptr);

/// Product over axes of Boltzmann-max(p + r) - Boltzmann-min(p - r) over all
/// body spheres.
double smooth_aabb_volume(const WorldFrame& frame, double alpha, VecX* grad = nullptr);
double smooth_aabb_volume(const VecX& x, const ProblemSpec& spec, double alpha,
                          VecX* grad = nullptr);

struct Aabb {
  Vec3 lower = Vec3::Zero();
  Vec3 upper = Vec3::Zero();
  double volume() const { return (upper - lower).prod(); }
};

Aabb exact_aabb(const WorldFrame& frame);
double exact_aabb_volume(const WorldFrame& frame);
double exact_aabb_volume(const VecX& x, const ProblemSpec& spec);

/// Mean distance over sphere-center pairs taken from different bodies.
/// Throws ModelError with fewer than two bodies.
double mean_pairwise_distance(const WorldFrame& frame, VecX* grad = nullptr);
double mean_pairwise_distance(const VecX& x, const ProblemSpec& spec, VecX* grad = nullptr);

/// Unweighted term values; `total` is the weighted sum.
struct ObjectiveBreakdown {
  double routing = 0.0;
  double boundary = 0.0;
  double cog = 0.0;
  double inertia = 0.0;
  double volume = 0.0;
  double mean_distance = 0.0;
  double total = 0.0;
};

/// Terms with zero weight are skipped (reported as 0). The boundary term is
/// skipped when the spec has no boundary.
ObjectiveBreakdown total_objective(const WorldFrame& frame, const ProblemSpec& spec,
                                   const ObjectiveWeights& weights, VecX* grad = nullptr);
ObjectiveBreakdown total_objective(const VecX& x, const ProblemSpec& spec,
                                   const ObjectiveWeights& weights, VecX* grad = nullptr);
inline ObjectiveBreakdown total_objective(const VecX& x, const ProblemSpec& spec,
                                          VecX* grad = nullptr) {
  return total_objective(x, spec, spec.weights, grad);
}

}  // namespace spi2
