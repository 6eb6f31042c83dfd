#pragma once

// Analytic solids used to build sphere decompositions of bodies and design
// boundaries: boxes with rectangular cut-outs and circular frustums.

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Geometry>

#include "spi2/geometry.hpp"

namespace spi2 {

using Box3 = Eigen::AlignedBox3d;

class Solid {
 public:
  virtual ~Solid() = default;

  /// Distance from an interior point to the surface; <= 0 outside.
  virtual double interior_distance(const Vec3& p) const = 0;
  virtual Box3 bounds() const = 0;
  virtual double volume() const = 0;

  /// Area-weighted uniform samples on the surface. Throws std::logic_error
  /// for solids without a surface sampler.
  virtual std::vector<Vec3> sample_surface(std::size_t n, std::uint64_t seed) const;

  bool contains(const Vec3& p) const { return interior_distance(p) > 0.0; }
};

/// Axis-aligned box minus a set of axis-aligned boxes.
class BoxSolid final : public Solid {
 public:
  explicit BoxSolid(Box3 outer, std::vector<Box3> cuts = {});

  double interior_distance(const Vec3& p) const override;
  Box3 bounds() const override { return outer_; }
  double volume() const override;
  std::vector<Vec3> sample_surface(std::size_t n, std::uint64_t seed) const override;

  const std::vector<Box3>& cuts() const { return cuts_; }

 private:
  Box3 outer_;
  std::vector<Box3> cuts_;
};

/// Truncated cone along +z from z = 0 (radius r0) to z = length (radius r1).
class FrustumSolid final : public Solid {
 public:
  FrustumSolid(double r0, double r1, double length);

  double interior_distance(const Vec3& p) const override;
  Box3 bounds() const override;
  double volume() const override;
  std::vector<Vec3> sample_surface(std::size_t n, std::uint64_t seed) const override;

 private:
  double r0_, r1_, length_;
};

struct PackingResult {
  std::vector<Sphere> spheres;
  bool truncated = false;  // fewer spheres than requested
  double fill_ratio = 0.0;
};

/// Greedy maximal disjoint ball packing on a lattice with `spacing` between
/// nodes: repeatedly place the largest ball that fits inside the solid and
/// clear of placed balls. Ties go to the node farthest from the bounds
/// center, then to the first node in scan order. Stops after `n_spheres`
/// balls or when no ball of radius above `min_radius` fits.
PackingResult greedy_ball_packing(const Solid& solid, std::size_t n_spheres, double spacing,
                                  double min_radius = 0.0);

/// Lattice nodes strictly inside the solid and not inside any of `spheres`.
struct CoverageReport {
  std::size_t interior_nodes = 0;
  std::size_t uncovered_nodes = 0;
  double uncovered_fraction() const {
    return interior_nodes == 0 ? 0.0
                               : static_cast<double>(uncovered_nodes) / interior_nodes;
  }
};
CoverageReport coverage(const Solid& solid, const std::vector<Sphere>& spheres, double spacing);

}  // namespace spi2
