#pragma once

// Problem description shared by every evaluator: bodies, routes, optional
// design boundary, objective weights, bounds and constraint handling.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "spi2/geometry.hpp"

namespace spi2 {

enum class RoutingVariant { Quadratic, Exponential };

/// Weights of the composite objective plus the shape parameters of the
/// individual terms.
struct ObjectiveWeights {
  double routing = 0.0;
  double boundary = 0.0;
  double cog = 0.0;
  double inertia = 0.0;
  double volume = 0.0;
  double mean_distance = 0.0;
  RoutingVariant routing_variant = RoutingVariant::Quadratic;
  double gamma = 1.0;           // exponential routing sharpness
  double alpha_volume = 50.0;   // Boltzmann sharpness of the smooth AABB
  Vec3 inertia_axes = Vec3::Ones();

  void validate() const;
};

/// Named objective presets: f1/f3 = volume + quadratic routing,
/// f2/f4 = volume + exponential routing.
ObjectiveWeights objective_preset(const std::string& name);

enum class ConstraintModeKind { Absolute, SoftSum };

struct ConstraintMode {
  ConstraintModeKind kind = ConstraintModeKind::Absolute;
  double beta = 50.0;
  double epsilon = 1e-3;

  void validate() const;
};

/// Which spheres a port-incident route segment ignores.
///  Local:    spheres of the port's body whose surface lies within twice the
///            tube radius of the port.
///  HostBody: every sphere of the port's body (ports inside the body).
enum class RouteExemption { Local, HostBody };

/// Non-convex design space: interior coverage spheres plus surface samples.
struct BoundaryModel {
  std::vector<Sphere> spheres;
  std::vector<Vec3> surface_points;
  double alpha_union = 50.0;
  double alpha_points = 50.0;
  double beta = 20.0;
  double delta_union = 0.01;
  double delta_points = 0.01;
  double w_union = 1.0;
  double w_points = 1.0;

  void validate() const;
};

/// Box for translations and control points; angles are limited to
/// [-angle_limit, angle_limit].
struct Bounds {
  Vec3 lower = Vec3::Constant(-5.0);
  Vec3 upper = Vec3::Constant(5.0);
  double angle_limit = 2.0 * std::numbers::pi;
};

struct KnownOptimum {
  double volume = 0.0;
  double routing_length = 0.0;
};

struct ProblemSpec {
  std::string id;
  std::vector<Body> bodies;
  std::vector<Route> routes;
  std::optional<BoundaryModel> boundary;
  ObjectiveWeights weights;
  Bounds bounds;
  ConstraintMode constraint_mode;
  RouteExemption route_exemption = RouteExemption::Local;
  Vec3 cog_target = Vec3::Zero();
  std::optional<KnownOptimum> known_optimum;
  /// Explicit layout achieving `known_optimum`, when one is known.
  std::optional<VecX> certificate;

  DesignLayout layout() const { return DesignLayout(bodies.size(), routes); }
  WorldFrame frame(const DesignLayout& layout, const VecX& x) const {
    return WorldFrame(bodies, routes, layout, x);
  }

  /// Throws ModelError describing the first inconsistency found.
  void validate() const;
  std::size_t body_index(const std::string& body_id) const;
};

VecX lower_bounds(const ProblemSpec& spec);
VecX upper_bounds(const ProblemSpec& spec);
VecX clamp_to_bounds(const ProblemSpec& spec, const VecX& x);

/// Route nodes using the spec's bodies and layout.
std::vector<Vec3> route_nodes(const ProblemSpec& spec, std::size_t route, const VecX& x);

/// Volume-weighted centroid and inertia of a sphere cloud at unit density,
/// each sphere treated as a solid ball. Returns {mass, cog, inertia about cog}.
struct MassProperties {
  double mass = 0.0;
  Vec3 cog = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();
};
MassProperties sphere_cloud_mass_properties(const std::vector<Sphere>& spheres,
                                            double density = 1.0);

}  // namespace spi2
