#include "spi2/geometry.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace spi2 {

double min_internal_clearance(const Body& body) {
  double best = std::numeric_limits<double>::infinity();
  const auto& s = body.spheres;
  for (std::size_t a = 0; a < s.size(); ++a) {
    for (std::size_t b = a + 1; b < s.size(); ++b) {
      const double d = (s[a].center - s[b].center).norm() - (s[a].radius + s[b].radius);
      best = std::min(best, d);
    }
  }
  return best;
}

void validate_body(const Body& body, double tol_disjoint) {
  const auto fail = [&](const std::string& what) {
    throw ModelError("body '" + body.id + "': " + what);
  };
  if (body.spheres.empty()) fail("needs at least one sphere");
  for (const auto& s : body.spheres) {
    if (!(s.radius > 0.0) || !std::isfinite(s.radius)) fail("sphere radius must be positive");
    if (!s.center.allFinite()) fail("sphere center must be finite");
  }
  if (!(body.mass > 0.0)) fail("mass must be positive");
  if (!body.cog_local.allFinite()) fail("cog must be finite");
  const Mat3& inertia = body.inertia_local;
  if (!inertia.allFinite() || (inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    fail("inertia tensor must be symmetric");
  }
  const double scale = std::max(1.0, inertia.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9 * scale) fail("inertia tensor must be PSD");
  const double clearance = min_internal_clearance(body);
  if (clearance < -tol_disjoint) {
    std::ostringstream msg;
    msg << "spheres overlap (min clearance " << clearance << ")";
    fail(msg.str());
  }
}

void validate_route(const Route& route, std::span<const Body> bodies) {
  const auto check_end = [&](const PortRef& ref, const char* end) {
    if (ref.body >= bodies.size()) {
      throw ModelError("route '" + route.id + "': " + end + " references missing body " +
                       std::to_string(ref.body));
    }
    if (ref.port >= bodies[ref.body].ports.size()) {
      throw ModelError("route '" + route.id + "': " + end + " references missing port " +
                       std::to_string(ref.port) + " on body '" + bodies[ref.body].id + "'");
    }
  };
  check_end(route.from, "from");
  check_end(route.to, "to");
  if (!(route.radius >= 0.0)) throw ModelError("route '" + route.id + "': negative radius");
}

namespace {

Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}
Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}
Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}
Mat3 drot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << -s, -c, 0, c, -s, 0, 0, 0, 0;
  return m;
}
Mat3 drot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << -s, 0, c, 0, 0, 0, -c, 0, -s;
  return m;
}
Mat3 drot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 0, 0, 0, 0, -s, -c, 0, c, -s;
  return m;
}

}  // namespace

Mat3 rotation_matrix(double yaw, double pitch, double roll) {
  return rot_z(yaw) * rot_y(pitch) * rot_x(roll);
}

RotationJet rotation_jet(double yaw, double pitch, double roll) {
  const Mat3 rz = rot_z(yaw), ry = rot_y(pitch), rx = rot_x(roll);
  RotationJet jet;
  jet.value = rz * ry * rx;
  jet.partials[0] = drot_z(yaw) * ry * rx;
  jet.partials[1] = rz * drot_y(pitch) * rx;
  jet.partials[2] = rz * ry * drot_x(roll);
  return jet;
}

Vec3 transform_point(const Pose& pose, const Vec3& p_local) {
  return rotation_matrix(pose.yaw, pose.pitch, pose.roll) * p_local + pose.translation;
}

DesignLayout::DesignLayout(std::size_t n_bodies, std::vector<std::size_t> control_points_per_route)
    : n_bodies_(n_bodies), cp_counts_(std::move(control_points_per_route)) {
  std::size_t offset = n_bodies_ * kPoseDof;
  cp_offsets_.reserve(cp_counts_.size());
  for (std::size_t n : cp_counts_) {
    cp_offsets_.push_back(offset);
    offset += 3 * n;
  }
  dimension_ = offset;
}

DesignLayout::DesignLayout(std::size_t n_bodies, std::span<const Route> routes)
    : DesignLayout(n_bodies, [&] {
        std::vector<std::size_t> counts;
        counts.reserve(routes.size());
        for (const auto& r : routes) counts.push_back(r.n_control_points);
        return counts;
      }()) {}

std::size_t DesignLayout::total_control_points() const {
  return std::accumulate(cp_counts_.begin(), cp_counts_.end(), std::size_t{0});
}

void DesignLayout::check(const VecX& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension_) {
    throw DimensionError("design vector has length " + std::to_string(x.size()) +
                         ", layout expects " + std::to_string(dimension_));
  }
}

VecX pack(const DesignLayout& layout, std::span<const Pose> poses,
          const std::vector<std::vector<Vec3>>& control_points) {
  if (poses.size() != layout.n_bodies()) {
    throw DimensionError("pack: expected " + std::to_string(layout.n_bodies()) + " poses, got " +
                         std::to_string(poses.size()));
  }
  if (control_points.size() != layout.n_routes()) {
    throw DimensionError("pack: expected control points for " +
                         std::to_string(layout.n_routes()) + " routes");
  }
  VecX x(layout.dimension());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const std::size_t o = layout.pose_offset(i);
    x[o] = poses[i].yaw;
    x[o + 1] = poses[i].pitch;
    x[o + 2] = poses[i].roll;
    x.segment<3>(o + 3) = poses[i].translation;
  }
  for (std::size_t r = 0; r < control_points.size(); ++r) {
    if (control_points[r].size() != layout.n_control_points(r)) {
      throw DimensionError("pack: route " + std::to_string(r) + " expects " +
                           std::to_string(layout.n_control_points(r)) + " control points");
    }
    for (std::size_t k = 0; k < control_points[r].size(); ++k) {
      x.segment<3>(layout.control_point_offset(r, k)) = control_points[r][k];
    }
  }
  return x;
}

Pose pose_at(const DesignLayout& layout, const VecX& x, std::size_t body) {
  const std::size_t o = layout.pose_offset(body);
  return Pose{x[o], x[o + 1], x[o + 2], x.segment<3>(o + 3)};
}

DesignState unpack(const DesignLayout& layout, const VecX& x) {
  layout.check(x);
  DesignState state;
  state.poses.reserve(layout.n_bodies());
  for (std::size_t i = 0; i < layout.n_bodies(); ++i) state.poses.push_back(pose_at(layout, x, i));
  state.control_points.resize(layout.n_routes());
  for (std::size_t r = 0; r < layout.n_routes(); ++r) {
    for (std::size_t k = 0; k < layout.n_control_points(r); ++k) {
      state.control_points[r].push_back(x.segment<3>(layout.control_point_offset(r, k)));
    }
  }
  return state;
}

std::vector<Vec3> route_nodes(const Route& route, std::size_t route_index, const VecX& x,
                              const DesignLayout& layout, std::span<const Body> bodies) {
  validate_route(route, bodies);
  layout.check(x);
  std::vector<Vec3> nodes;
  nodes.reserve(route.n_nodes());
  const auto port_world = [&](const PortRef& ref) {
    return transform_point(pose_at(layout, x, ref.body), bodies[ref.body].ports[ref.port]);
  };
  nodes.push_back(port_world(route.from));
  for (std::size_t k = 0; k < route.n_control_points; ++k) {
    nodes.push_back(x.segment<3>(layout.control_point_offset(route_index, k)));
  }
  nodes.push_back(port_world(route.to));
  return nodes;
}

WorldFrame::WorldFrame(std::span<const Body> bodies, std::span<const Route> routes,
                       const DesignLayout& layout, const VecX& x)
    : bodies_(bodies), routes_(routes), layout_(layout) {
  layout.check(x);
  const std::size_t n = bodies.size();
  rotations_.reserve(n);
  translations_.reserve(n);
  sphere_offsets_.reserve(n);
  port_offsets_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t o = layout.pose_offset(i);
    rotations_.push_back(rotation_jet(x[o], x[o + 1], x[o + 2]));
    translations_.push_back(x.segment<3>(o + 3));
    const Mat3& r = rotations_.back().value;
    const Vec3& t = translations_.back();
    sphere_offsets_.push_back(centers_.size());
    for (const auto& s : bodies[i].spheres) centers_.push_back(r * s.center + t);
    port_offsets_.push_back(ports_.size());
    for (const auto& p : bodies[i].ports) ports_.push_back(r * p + t);
  }
  nodes_.resize(routes.size());
  for (std::size_t r = 0; r < routes.size(); ++r) {
    const Route& route = routes[r];
    auto& nodes = nodes_[r];
    nodes.reserve(route.n_nodes());
    nodes.push_back(port(route.from));
    for (std::size_t k = 0; k < route.n_control_points; ++k) {
      nodes.push_back(x.segment<3>(layout.control_point_offset(r, k)));
    }
    nodes.push_back(port(route.to));
  }
}

Vec3 WorldFrame::world_point(std::size_t body, const Vec3& p_local) const {
  return rotations_[body].value * p_local + translations_[body];
}

void WorldFrame::add_body_point_gradient(std::size_t body, const Vec3& p_local, const Vec3& g,
                                         VecX& grad) const {
  const std::size_t o = layout_.pose_offset(body);
  const auto& jet = rotations_[body];
  for (int a = 0; a < 3; ++a) grad[o + a] += g.dot(jet.partials[a] * p_local);
  grad.segment<3>(o + 3) += g;
}

void WorldFrame::add_sphere_gradient(std::size_t body, std::size_t s, const Vec3& g,
                                     VecX& grad) const {
  add_body_point_gradient(body, bodies_[body].spheres[s].center, g, grad);
}

void WorldFrame::add_route_node_gradient(std::size_t route, std::size_t node, const Vec3& g,
                                         VecX& grad) const {
  const Route& r = routes_[route];
  if (node == 0) {
    add_body_point_gradient(r.from.body, bodies_[r.from.body].ports[r.from.port], g, grad);
  } else if (node + 1 == r.n_nodes()) {
    add_body_point_gradient(r.to.body, bodies_[r.to.body].ports[r.to.port], g, grad);
  } else {
    grad.segment<3>(layout_.control_point_offset(route, node - 1)) += g;
  }
}

}  // namespace spi2
