#include "spi2/solid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace spi2 {

std::vector<Vec3> Solid::sample_surface(std::size_t, std::uint64_t) const {
  throw std::logic_error("surface sampling is not available for this solid");
}

BoxSolid::BoxSolid(Box3 outer, std::vector<Box3> cuts) : outer_(outer), cuts_(std::move(cuts)) {
  if (outer_.isEmpty() || (outer_.sizes().array() <= 0.0).any()) {
    throw ModelError("box solid needs a non-degenerate outer box");
  }
}

double BoxSolid::interior_distance(const Vec3& p) const {
  if (!outer_.contains(p)) return -outer_.exteriorDistance(p);
  double d = std::min((p - outer_.min()).minCoeff(), (outer_.max() - p).minCoeff());
  for (const auto& cut : cuts_) {
    if (cut.contains(p)) return 0.0;
    d = std::min(d, cut.exteriorDistance(p));
  }
  return d;
}

double BoxSolid::volume() const {
  double v = outer_.volume();
  for (const auto& cut : cuts_) v -= cut.intersection(outer_).volume();
  return v;
}

std::vector<Vec3> BoxSolid::sample_surface(std::size_t n, std::uint64_t seed) const {
  if (!cuts_.empty()) return Solid::sample_surface(n, seed);
  const Vec3 size = outer_.sizes();
  const std::array<double, 3> face_area{size.y() * size.z(), size.x() * size.z(),
                                        size.x() * size.y()};
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick{face_area[0], face_area[0], face_area[1],
                                       face_area[1], face_area[2], face_area[2]};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int face = pick(rng);
    const int axis = face / 2;
    Vec3 p;
    for (int a = 0; a < 3; ++a) p[a] = outer_.min()[a] + unit(rng) * size[a];
    p[axis] = (face % 2 == 0) ? outer_.min()[axis] : outer_.max()[axis];
    out.push_back(p);
  }
  return out;
}

FrustumSolid::FrustumSolid(double r0, double r1, double length)
    : r0_(r0), r1_(r1), length_(length) {
  if (!(r0 > 0.0) || !(r1 > 0.0) || !(length > 0.0)) {
    throw ModelError("frustum needs positive radii and length");
  }
}

double FrustumSolid::interior_distance(const Vec3& p) const {
  const double rho = std::hypot(p.x(), p.y());
  const double z = p.z();
  const double radius_at = r0_ + (r1_ - r0_) * std::clamp(z / length_, 0.0, 1.0);
  if (z <= 0.0 || z >= length_ || rho >= radius_at) return 0.0;
  // Distance to the slanted profile segment in the meridian half-plane.
  const Eigen::Vector2d a(r0_, 0.0), b(r1_, length_), q(rho, z);
  const Eigen::Vector2d ab = b - a;
  const double t = std::clamp((q - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  const double lateral = (q - (a + t * ab)).norm();
  return std::min({z, length_ - z, lateral});
}

Box3 FrustumSolid::bounds() const {
  const double r = std::max(r0_, r1_);
  return Box3(Vec3(-r, -r, 0.0), Vec3(r, r, length_));
}

double FrustumSolid::volume() const {
  return std::numbers::pi * length_ * (r0_ * r0_ + r0_ * r1_ + r1_ * r1_) / 3.0;
}

std::vector<Vec3> FrustumSolid::sample_surface(std::size_t n, std::uint64_t seed) const {
  const double slant = std::hypot(r1_ - r0_, length_);
  const double lateral_area = std::numbers::pi * (r0_ + r1_) * slant;
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick{std::numbers::pi * r0_ * r0_,
                                       std::numbers::pi * r1_ * r1_, lateral_area};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r_max = std::max(r0_, r1_);
  std::vector<Vec3> out;
  out.reserve(n);
  while (out.size() < n) {
    const int part = pick(rng);
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    if (part < 2) {
      const double cap_r = (part == 0 ? r0_ : r1_) * std::sqrt(unit(rng));
      out.emplace_back(cap_r * std::cos(angle), cap_r * std::sin(angle),
                       part == 0 ? 0.0 : length_);
      continue;
    }
    // Lateral density is proportional to the local radius.
    const double u = unit(rng);
    const double r = r0_ + (r1_ - r0_) * u;
    if (unit(rng) * r_max > r) continue;
    out.emplace_back(r * std::cos(angle), r * std::sin(angle), u * length_);
  }
  return out;
}

namespace {

struct Lattice {
  Vec3 origin;
  Vec3 extent;
  std::array<std::size_t, 3> intervals;

  std::size_t size() const {
    return (intervals[0] + 1) * (intervals[1] + 1) * (intervals[2] + 1);
  }
  Vec3 node(std::size_t i, std::size_t j, std::size_t k) const {
    // extent * index / intervals keeps dyadic node coordinates exact.
    return {origin.x() + extent.x() * static_cast<double>(i) / intervals[0],
            origin.y() + extent.y() * static_cast<double>(j) / intervals[1],
            origin.z() + extent.z() * static_cast<double>(k) / intervals[2]};
  }
};

Lattice make_lattice(const Box3& bounds, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("lattice spacing must be positive");
  Lattice lat{bounds.min(), bounds.sizes(), {}};
  for (int a = 0; a < 3; ++a) {
    lat.intervals[a] = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(lat.extent[a] / spacing)));
  }
  return lat;
}

template <typename F>
void for_each_node(const Lattice& lat, F&& f) {
  for (std::size_t k = 0; k <= lat.intervals[2]; ++k) {
    for (std::size_t j = 0; j <= lat.intervals[1]; ++j) {
      for (std::size_t i = 0; i <= lat.intervals[0]; ++i) f(lat.node(i, j, k));
    }
  }
}

}  // namespace

PackingResult greedy_ball_packing(const Solid& solid, std::size_t n_spheres, double spacing,
                                  double min_radius) {
  const Box3 bounds = solid.bounds();
  const Lattice lat = make_lattice(bounds, spacing);
  const Vec3 mid = bounds.center();

  std::vector<Vec3> nodes;
  std::vector<double> room;
  nodes.reserve(lat.size());
  room.reserve(lat.size());
  for_each_node(lat, [&](const Vec3& p) {
    const double d = solid.interior_distance(p);
    if (d > 0.0) {
      nodes.push_back(p);
      room.push_back(d);
    }
  });

  PackingResult result;
  constexpr double kTie = 1e-12;
  while (result.spheres.size() < n_spheres) {
    std::size_t best = nodes.size();
    double best_r = min_radius;
    double best_far = -1.0;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      const double r = room[n];
      if (r <= min_radius) continue;
      if (r > best_r + kTie || best == nodes.size()) {
        best = n;
        best_r = r;
        best_far = (nodes[n] - mid).squaredNorm();
      } else if (r >= best_r - kTie) {
        const double far = (nodes[n] - mid).squaredNorm();
        if (far > best_far + kTie) {
          best = n;
          best_r = std::max(best_r, r);
          best_far = far;
        }
      }
    }
    if (best == nodes.size()) break;
    const Sphere ball{nodes[best], room[best]};
    result.spheres.push_back(ball);
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      room[n] = std::min(room[n], (nodes[n] - ball.center).norm() - ball.radius);
    }
  }
  result.truncated = result.spheres.size() < n_spheres;
  double filled = 0.0;
  for (const auto& s : result.spheres) {
    filled += 4.0 / 3.0 * std::numbers::pi * s.radius * s.radius * s.radius;
  }
  result.fill_ratio = filled / solid.volume();
  return result;
}

CoverageReport coverage(const Solid& solid, const std::vector<Sphere>& spheres, double spacing) {
  const Lattice lat = make_lattice(solid.bounds(), spacing);
  CoverageReport report;
  for_each_node(lat, [&](const Vec3& p) {
    if (solid.interior_distance(p) <= 0.0) return;
    ++report.interior_nodes;
    const bool covered = std::any_of(spheres.begin(), spheres.end(), [&](const Sphere& s) {
      return (p - s.center).norm() <= s.radius;
    });
    if (!covered) ++report.uncovered_nodes;
  });
  return report;
}

}  // namespace spi2
