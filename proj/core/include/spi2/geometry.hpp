#pragma once

// Rigid bodies as disjoint sphere sets, routes between body ports, and the
// packed design vector that positions both.

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spi2 {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;

/// Thrown when a vector does not have the length implied by a problem layout.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown for malformed bodies, routes or problem descriptions.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bodies whose spheres overlap by more than this are rejected at validation.
inline constexpr double kDisjointTolerance = 1e-9;

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// A rigid object in its local frame. `inertia_local` is taken about
/// `cog_local`.
struct Body {
  std::string id;
  std::vector<Sphere> spheres;
  std::vector<Vec3> ports;
  double mass = 1.0;
  Vec3 cog_local = Vec3::Zero();
  Mat3 inertia_local = Mat3::Zero();
};

/// Smallest pairwise clearance between the spheres of one body, +inf for a
/// single sphere.
double min_internal_clearance(const Body& body);

/// Throws ModelError unless the body has at least one sphere, positive radii,
/// positive mass, a symmetric PSD inertia tensor and pairwise disjoint spheres.
void validate_body(const Body& body, double tol_disjoint = kDisjointTolerance);

/// Yaw about z, pitch about y, roll about x; the rotation is
/// Rz(yaw) * Ry(pitch) * Rx(roll).
struct Pose {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
  Vec3 translation = Vec3::Zero();
};

struct PortRef {
  std::size_t body = 0;
  std::size_t port = 0;
  friend bool operator==(const PortRef&, const PortRef&) = default;
};

/// Piecewise-linear connection between two ports with `n_control_points`
/// free interior nodes, i.e. n_control_points + 1 segments.
struct Route {
  std::string id;
  PortRef from;
  PortRef to;
  std::size_t n_control_points = 0;
  double radius = 0.0;

  std::size_t n_segments() const { return n_control_points + 1; }
  std::size_t n_nodes() const { return n_control_points + 2; }
};

/// Throws ModelError if a route references a missing body or port, or has a
/// negative tube radius.
void validate_route(const Route& route, std::span<const Body> bodies);

Mat3 rotation_matrix(double yaw, double pitch, double roll);

/// Rotation matrix together with its partial derivatives with respect to
/// yaw, pitch and roll (in that order).
struct RotationJet {
  Mat3 value;
  std::array<Mat3, 3> partials;
};

RotationJet rotation_jet(double yaw, double pitch, double roll);

Vec3 transform_point(const Pose& pose, const Vec3& p_local);

/// Index arithmetic for the flat design vector: six pose coordinates per body
/// (yaw, pitch, roll, x, y, z) followed by the control points of every route
/// in route order, three coordinates each.
class DesignLayout {
 public:
  static constexpr std::size_t kPoseDof = 6;

  DesignLayout() = default;
  DesignLayout(std::size_t n_bodies, std::vector<std::size_t> control_points_per_route);
  DesignLayout(std::size_t n_bodies, std::span<const Route> routes);

  std::size_t n_bodies() const { return n_bodies_; }
  std::size_t n_routes() const { return cp_counts_.size(); }
  std::size_t dimension() const { return dimension_; }
  std::size_t n_control_points(std::size_t route) const { return cp_counts_.at(route); }
  std::size_t total_control_points() const;

  std::size_t pose_offset(std::size_t body) const { return body * kPoseDof; }
  std::size_t translation_offset(std::size_t body) const { return body * kPoseDof + 3; }
  std::size_t control_point_offset(std::size_t route, std::size_t k) const {
    return cp_offsets_.at(route) + 3 * k;
  }

  /// Throws DimensionError if `x` does not match the layout.
  void check(const VecX& x) const;

 private:
  std::size_t n_bodies_ = 0;
  std::vector<std::size_t> cp_counts_;
  std::vector<std::size_t> cp_offsets_;
  std::size_t dimension_ = 0;
};

struct DesignState {
  std::vector<Pose> poses;
  std::vector<std::vector<Vec3>> control_points;
};

VecX pack(const DesignLayout& layout, std::span<const Pose> poses,
          const std::vector<std::vector<Vec3>>& control_points);
DesignState unpack(const DesignLayout& layout, const VecX& x);
Pose pose_at(const DesignLayout& layout, const VecX& x, std::size_t body);

/// Ordered nodes of one route: world port, control points verbatim, world port.
std::vector<Vec3> route_nodes(const Route& route, std::size_t route_index, const VecX& x,
                              const DesignLayout& layout, std::span<const Body> bodies);

/// World-frame snapshot of every sphere, port and route node for one design
/// vector. Also scatters gradients taken with respect to world points back
/// onto design-vector coordinates.
class WorldFrame {
 public:
  WorldFrame(std::span<const Body> bodies, std::span<const Route> routes,
             const DesignLayout& layout, const VecX& x);

  std::size_t n_bodies() const { return bodies_.size(); }
  std::size_t n_routes() const { return routes_.size(); }
  const Body& body(std::size_t i) const { return bodies_[i]; }
  const Route& route(std::size_t r) const { return routes_[r]; }
  const DesignLayout& layout() const { return layout_; }

  const RotationJet& rotation(std::size_t body) const { return rotations_[body]; }
  const Vec3& translation(std::size_t body) const { return translations_[body]; }

  std::span<const Vec3> sphere_centers(std::size_t body) const {
    return {centers_.data() + sphere_offsets_[body], bodies_[body].spheres.size()};
  }
  double sphere_radius(std::size_t body, std::size_t s) const {
    return bodies_[body].spheres[s].radius;
  }
  std::size_t total_spheres() const { return centers_.size(); }

  Vec3 world_point(std::size_t body, const Vec3& p_local) const;
  const Vec3& port(const PortRef& ref) const { return ports_[port_offsets_[ref.body] + ref.port]; }
  std::span<const Vec3> route_nodes(std::size_t route) const { return nodes_[route]; }

  /// grad += d(world point)/dx^T * g for a point fixed in the body frame.
  void add_body_point_gradient(std::size_t body, const Vec3& p_local, const Vec3& g,
                               VecX& grad) const;
  void add_sphere_gradient(std::size_t body, std::size_t s, const Vec3& g, VecX& grad) const;
  void add_route_node_gradient(std::size_t route, std::size_t node, const Vec3& g,
                               VecX& grad) const;

 private:
  std::span<const Body> bodies_;
  std::span<const Route> routes_;
  DesignLayout layout_;
  std::vector<RotationJet> rotations_;
  std::vector<Vec3> translations_;
  std::vector<std::size_t> sphere_offsets_;
  std::vector<Vec3> centers_;
  std::vector<std::size_t> port_offsets_;
  std::vector<Vec3> ports_;
  std::vector<std::vector<Vec3>> nodes_;
};

}  // namespace spi2
