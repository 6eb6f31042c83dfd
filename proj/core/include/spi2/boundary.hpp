#pragma once

// Smooth inside/outside evaluation of body spheres against a non-convex
// design boundary given as interior coverage spheres plus surface samples.
//
// Per object sphere (i, v):
//   union envelope  u = soft-min over boundary spheres of |c_B - c| - r_B
//                      (negative when the center lies in some boundary sphere)
//   point envelope  p = soft-min over surface points of |q - c| - r
//                      (positive when no surface point is inside the sphere)
//   penalty         w_union H(u + delta_u) + w_points H(-p - delta_p)
// and f_B is the sum over all object spheres.

#include <cstdint>
#include <vector>

#include "spi2/problem.hpp"
#include "spi2/solid.hpp"

namespace spi2 {

/// Signed distance of an object-sphere center to one boundary sphere shell;
/// negative inside.
double phi(const Sphere& boundary_sphere, const Vec3& center);

/// Clearance of one surface point outside an object sphere; negative when
/// the point lies inside the sphere.
double rho(const Vec3& surface_point, const Sphere& s);

/// Smooth penalty of a single world-frame object sphere. `grad_center`, when
/// given, receives d/d(center).
double boundary_sphere_penalty(const BoundaryModel& bm, const Sphere& world_sphere,
                               Vec3* grad_center = nullptr);

/// f_B(x); accumulates df_B/dx into `grad` when given.
double boundary_objective(const VecX& x, const ProblemSpec& spec, const BoundaryModel& bm,
                          VecX* grad = nullptr);
double boundary_objective(const WorldFrame& frame, const BoundaryModel& bm, VecX* grad = nullptr);

struct InclusionResult {
  double phi_max = 0.0;   // max over object spheres of min over boundary spheres
  double rho_min = 0.0;   // min over object spheres and surface points
  bool inside = false;
  std::size_t spheres_inside = 0;
  std::size_t spheres_total = 0;
  double inside_fraction() const {
    return spheres_total == 0 ? 1.0 : static_cast<double>(spheres_inside) / spheres_total;
  }
};

/// Exact (non-smooth) inclusion check: every object-sphere center lies in at
/// least one boundary sphere and no surface point lies inside any object
/// sphere.
InclusionResult hard_inclusion_check(const VecX& x, const ProblemSpec& spec,
                                     const BoundaryModel& bm);

struct BoundaryBuildOptions {
  std::size_t grid = 16;            // lattice nodes along the longest extent
  std::size_t surface_points = 600;
  std::size_t max_spheres = 2000;
  double min_radius_cells = 1.0;    // stop when balls shrink below this many cells
  std::uint64_t seed = 7;
};

struct BoundaryFixture {
  BoundaryModel model;
  CoverageReport coverage;
  /// Non-empty when part of the interior lies in no boundary sphere.
  std::vector<std::string> warnings;
};

/// Greedy disjoint-ball filling of the solid plus uniform surface samples.
BoundaryFixture build_boundary(const Solid& solid, const BoundaryBuildOptions& options = {});

/// Unit cube [-0.5, 0.5]^3 boundary with default parameters.
BoundaryFixture unit_cube_boundary(const BoundaryBuildOptions& options = {});

}  // namespace spi2
