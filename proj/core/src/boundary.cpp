#include "spi2/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spi2/smooth.hpp"

namespace spi2 {

double phi(const Sphere& boundary_sphere, const Vec3& center) {
  return (boundary_sphere.center - center).norm() - boundary_sphere.radius;
}

double rho(const Vec3& surface_point, const Sphere& s) {
  return (surface_point - s.center).norm() - s.radius;
}

namespace {

// Terms further than this (in units of 1/alpha) above the minimum carry
// weight below e^-40 and are skipped.
constexpr double kNegligible = 40.0;

// Soft-min over {|a_k - c| - r_k} with its gradient wrt c.
template <typename CenterAt, typename RadiusAt>
double soft_min_distance(std::size_t n, CenterAt&& center_at, RadiusAt&& radius_at,
                         const Vec3& c, double alpha, Vec3* grad,
                         std::vector<double>& dist, std::vector<Vec3>& dirs) {
  dist.resize(n);
  if (grad) dirs.resize(n);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 diff = c - center_at(k);
    const double len = guarded_norm(diff);
    dist[k] = len - radius_at(k);
    if (grad) dirs[k] = diff / len;
    lo = std::min(lo, dist[k]);
  }
  double sum = 0.0;
  Vec3 g = Vec3::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    const double z = alpha * (dist[k] - lo);
    if (z > kNegligible) continue;
    const double w = std::exp(-z);
    sum += w;
    if (grad) g += w * dirs[k];
  }
  if (grad) *grad = g / sum;
  return lo - std::log(sum) / alpha;
}

}  // namespace

double boundary_sphere_penalty(const BoundaryModel& bm, const Sphere& s, Vec3* grad_center) {
  thread_local std::vector<double> dist;
  thread_local std::vector<Vec3> dirs;
  Vec3 g_union = Vec3::Zero(), g_points = Vec3::Zero();
  const bool want = grad_center != nullptr;

  const double u = soft_min_distance(
      bm.spheres.size(), [&](std::size_t k) -> const Vec3& { return bm.spheres[k].center; },
      [&](std::size_t k) { return bm.spheres[k].radius; }, s.center, bm.alpha_union,
      want ? &g_union : nullptr, dist, dirs);
  // rho = |q - c| - r: every term shares the radius of the object sphere.
  const double p = soft_min_distance(
      bm.surface_points.size(), [&](std::size_t k) -> const Vec3& { return bm.surface_points[k]; },
      [&](std::size_t) { return s.radius; }, s.center, bm.alpha_points,
      want ? &g_points : nullptr, dist, dirs);

  const double a = u + bm.delta_union;
  const double b = -p - bm.delta_points;
  const double value = bm.w_union * hinge(a, bm.beta) + bm.w_points * hinge(b, bm.beta);
  if (want) {
    *grad_center = bm.w_union * hinge_derivative(a, bm.beta) * g_union -
                   bm.w_points * hinge_derivative(b, bm.beta) * g_points;
  }
  return value;
}

double boundary_objective(const WorldFrame& frame, const BoundaryModel& bm, VecX* grad) {
  double total = 0.0;
  for (std::size_t i = 0; i < frame.n_bodies(); ++i) {
    const auto centers = frame.sphere_centers(i);
    for (std::size_t s = 0; s < centers.size(); ++s) {
      Vec3 g;
      total += boundary_sphere_penalty(bm, Sphere{centers[s], frame.sphere_radius(i, s)},
                                       grad ? &g : nullptr);
      if (grad) frame.add_sphere_gradient(i, s, g, *grad);
    }
  }
  return total;
}

double boundary_objective(const VecX& x, const ProblemSpec& spec, const BoundaryModel& bm,
                          VecX* grad) {
  const DesignLayout layout = spec.layout();
  return boundary_objective(spec.frame(layout, x), bm, grad);
}

InclusionResult hard_inclusion_check(const VecX& x, const ProblemSpec& spec,
                                     const BoundaryModel& bm) {
  const DesignLayout layout = spec.layout();
  const WorldFrame frame = spec.frame(layout, x);
  InclusionResult out;
  out.phi_max = -std::numeric_limits<double>::infinity();
  out.rho_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < frame.n_bodies(); ++i) {
    const auto centers = frame.sphere_centers(i);
    for (std::size_t s = 0; s < centers.size(); ++s) {
      const Sphere sphere{centers[s], frame.sphere_radius(i, s)};
      double phi_s = std::numeric_limits<double>::infinity();
      for (const auto& b : bm.spheres) phi_s = std::min(phi_s, phi(b, sphere.center));
      double rho_s = std::numeric_limits<double>::infinity();
      for (const auto& q : bm.surface_points) rho_s = std::min(rho_s, rho(q, sphere));
      out.phi_max = std::max(out.phi_max, phi_s);
      out.rho_min = std::min(out.rho_min, rho_s);
      ++out.spheres_total;
      if (phi_s <= 0.0 && rho_s >= 0.0) ++out.spheres_inside;
    }
  }
  out.inside = out.phi_max <= 0.0 && out.rho_min >= 0.0;
  return out;
}

BoundaryFixture build_boundary(const Solid& solid, const BoundaryBuildOptions& options) {
  if (options.grid < 2) throw ModelError("boundary grid needs at least 2 cells");
  const double spacing = solid.bounds().sizes().maxCoeff() / static_cast<double>(options.grid);
  BoundaryFixture fixture;
  const PackingResult packing = greedy_ball_packing(solid, options.max_spheres, spacing,
                                                    options.min_radius_cells * spacing);
  fixture.model.spheres = packing.spheres;
  fixture.model.surface_points = solid.sample_surface(options.surface_points, options.seed);
  fixture.model.validate();
  fixture.coverage = coverage(solid, fixture.model.spheres, spacing);
  if (fixture.coverage.uncovered_nodes > 0) {
    std::ostringstream msg;
    msg << fixture.coverage.uncovered_nodes << " of " << fixture.coverage.interior_nodes
        << " interior lattice nodes lie in no boundary sphere";
    fixture.warnings.push_back(msg.str());
  }
  return fixture;
}

BoundaryFixture unit_cube_boundary(const BoundaryBuildOptions& options) {
  const BoxSolid cube(Box3(Vec3::Constant(-0.5), Vec3::Constant(0.5)));
  return build_boundary(cube, options);
}

}  // namespace spi2
