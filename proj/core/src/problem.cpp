#include "spi2/problem.hpp"

#include <numbers>
#include <set>

namespace spi2 {

void ObjectiveWeights::validate() const {
  for (double w : {routing, boundary, cog, inertia, volume, mean_distance}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ModelError("objective weights must be >= 0");
  }
  if (!(gamma > 0.0)) throw ModelError("exponential routing gamma must be positive");
  if (!(alpha_volume > 0.0)) throw ModelError("volume sharpness must be positive");
  if ((inertia_axes.array() < 0.0).any()) throw ModelError("inertia axis weights must be >= 0");
}

ObjectiveWeights objective_preset(const std::string& name) {
  ObjectiveWeights w;
  w.volume = 1.0;
  w.routing = 1.0;
  if (name == "f1" || name == "f3") {
    w.routing_variant = RoutingVariant::Quadratic;
  } else if (name == "f2" || name == "f4") {
    w.routing_variant = RoutingVariant::Exponential;
  } else {
    throw ModelError("unknown objective preset '" + name + "' (expected f1, f2, f3 or f4)");
  }
  return w;
}

void ConstraintMode::validate() const {
  if (!(beta > 0.0)) throw ModelError("soft-sum sharpness must be positive");
  if (!(epsilon >= 0.0)) throw ModelError("soft-sum margin must be >= 0");
}

void BoundaryModel::validate() const {
  if (spheres.empty()) throw ModelError("boundary needs at least one sphere");
  if (surface_points.empty()) throw ModelError("boundary needs at least one surface point");
  for (const auto& s : spheres) {
    if (!(s.radius > 0.0)) throw ModelError("boundary sphere radius must be positive");
  }
  if (!(alpha_union > 0.0) || !(alpha_points > 0.0) || !(beta > 0.0)) {
    throw ModelError("boundary sharpness parameters must be positive");
  }
  if (!(delta_union >= 0.0) || !(delta_points >= 0.0)) {
    throw ModelError("boundary margins must be >= 0");
  }
  if (!(w_union >= 0.0) || !(w_points >= 0.0)) throw ModelError("boundary weights must be >= 0");
}

void ProblemSpec::validate() const {
  if (bodies.empty()) throw ModelError("problem '" + id + "' has no bodies");
  std::set<std::string> ids;
  for (const auto& b : bodies) {
    validate_body(b);
    if (!ids.insert(b.id).second) throw ModelError("duplicate body id '" + b.id + "'");
  }
  for (const auto& r : routes) validate_route(r, bodies);
  if (boundary) boundary->validate();
  weights.validate();
  constraint_mode.validate();
  if ((bounds.lower.array() > bounds.upper.array()).any() || !bounds.lower.allFinite() ||
      !bounds.upper.allFinite()) {
    throw ModelError("bounds must be finite with lower <= upper");
  }
  if (!(bounds.angle_limit > 0.0)) throw ModelError("angle limit must be positive");
  if (!cog_target.allFinite()) throw ModelError("cog target must be finite");
  if (certificate) layout().check(*certificate);
}

std::size_t ProblemSpec::body_index(const std::string& body_id) const {
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    if (bodies[i].id == body_id) return i;
  }
  throw ModelError("unknown body id '" + body_id + "'");
}

namespace {

VecX bound_vector(const ProblemSpec& spec, bool upper) {
  const DesignLayout layout = spec.layout();
  VecX b(layout.dimension());
  const double angle = upper ? spec.bounds.angle_limit : -spec.bounds.angle_limit;
  const Vec3& box = upper ? spec.bounds.upper : spec.bounds.lower;
  for (std::size_t i = 0; i < layout.n_bodies(); ++i) {
    const std::size_t o = layout.pose_offset(i);
    b.segment<3>(o).setConstant(angle);
    b.segment<3>(o + 3) = box;
  }
  for (std::size_t r = 0; r < layout.n_routes(); ++r) {
    for (std::size_t k = 0; k < layout.n_control_points(r); ++k) {
      b.segment<3>(layout.control_point_offset(r, k)) = box;
    }
  }
  return b;
}

}  // namespace

VecX lower_bounds(const ProblemSpec& spec) { return bound_vector(spec, false); }
VecX upper_bounds(const ProblemSpec& spec) { return bound_vector(spec, true); }

VecX clamp_to_bounds(const ProblemSpec& spec, const VecX& x) {
  spec.layout().check(x);
  return x.cwiseMax(lower_bounds(spec)).cwiseMin(upper_bounds(spec));
}

std::vector<Vec3> route_nodes(const ProblemSpec& spec, std::size_t route, const VecX& x) {
  if (route >= spec.routes.size()) throw ModelError("route index out of range");
  return route_nodes(spec.routes[route], route, x, spec.layout(), spec.bodies);
}

MassProperties sphere_cloud_mass_properties(const std::vector<Sphere>& spheres, double density) {
  MassProperties mp;
  for (const auto& s : spheres) {
    const double m = density * 4.0 / 3.0 * std::numbers::pi * s.radius * s.radius * s.radius;
    mp.mass += m;
    mp.cog += m * s.center;
  }
  if (mp.mass <= 0.0) return mp;
  mp.cog /= mp.mass;
  for (const auto& s : spheres) {
    const double m = density * 4.0 / 3.0 * std::numbers::pi * s.radius * s.radius * s.radius;
    const Vec3 d = s.center - mp.cog;
    mp.inertia += Mat3::Identity() * (0.4 * m * s.radius * s.radius);
    mp.inertia += m * (d.squaredNorm() * Mat3::Identity() - d * d.transpose());
  }
  return mp;
}

}  // namespace spi2
