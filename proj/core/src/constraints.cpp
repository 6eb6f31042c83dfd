#include "spi2/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spi2/smooth.hpp"

namespace spi2 {

namespace {

constexpr double kDegenerate = 1e-30;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double sphere_clearance(const Sphere& a, const Sphere& b) {
  return guarded_norm(a.center - b.center) - (a.radius + b.radius);
}

double closest_segment_parameter(const Vec3& p0, const Vec3& p1, const Vec3& p) {
  const Vec3 d = p1 - p0;
  const double len2 = d.squaredNorm();
  if (len2 <= kDegenerate) return 0.0;
  return clamp01((p - p0).dot(d) / len2);
}

double segment_sphere_clearance(const Vec3& p0, const Vec3& p1, const Sphere& s,
                                double tube_radius) {
  const double t = closest_segment_parameter(p0, p1, s.center);
  const Vec3 q = p0 + t * (p1 - p0);
  return guarded_norm(s.center - q) - (s.radius + tube_radius);
}

std::pair<double, double> closest_segment_parameters(const Vec3& a0, const Vec3& a1,
                                                     const Vec3& b0, const Vec3& b1) {
  const Vec3 d1 = a1 - a0;
  const Vec3 d2 = b1 - b0;
  const Vec3 r = a0 - b0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  if (a <= kDegenerate && e <= kDegenerate) return {0.0, 0.0};
  if (a <= kDegenerate) return {0.0, clamp01(f / e)};
  const double c = d1.dot(r);
  if (e <= kDegenerate) return {clamp01(-c / a), 0.0};
  const double b = d1.dot(d2);
  const double denom = a * e - b * b;
  double s = denom > 1e-14 * a * e ? clamp01((b * f - c * e) / denom) : 0.0;
  double t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = clamp01(-c / a);
  } else if (t > 1.0) {
    t = 1.0;
    s = clamp01((b - c) / a);
  }
  return {s, t};
}

double segment_segment_clearance(const Vec3& a0, const Vec3& a1, const Vec3& b0, const Vec3& b1,
                                 double tube_a, double tube_b) {
  const auto [s, t] = closest_segment_parameters(a0, a1, b0, b1);
  const Vec3 qa = a0 + s * (a1 - a0);
  const Vec3 qb = b0 + t * (b1 - b0);
  return guarded_norm(qa - qb) - (tube_a + tube_b);
}

std::size_t pair_count(std::span<const std::size_t> sphere_counts) {
  std::size_t total = 0, prefix = 0;
  for (std::size_t n : sphere_counts) {
    total += prefix * n;
    prefix += n;
  }
  return total;
}

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::ObjObj: return "obj-obj";
    case ConstraintKind::RouteObj: return "route-obj";
    case ConstraintKind::RouteRoute: return "route-route";
    case ConstraintKind::Enclosing: return "enclosing";
  }
  return "?";
}

double ConstraintVector::max_violation() const {
  if (values.size() == 0) return 0.0;
  return std::max(0.0, values.maxCoeff());
}

EnclosingSphere enclosing_sphere(const Body& body) {
  const auto& s = body.spheres;
  EnclosingSphere out;
  if (s.empty()) return out;
  const auto farthest = [&](const Vec3& from) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double d = (s[k].center - from).squaredNorm();
      if (d > best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  };
  const std::size_t y = farthest(s[0].center);
  const std::size_t z = farthest(s[y].center);
  Vec3 center = 0.5 * (s[y].center + s[z].center);
  double radius = 0.5 * (s[y].center - s[z].center).norm();
  for (const auto& sp : s) {
    const double d = (sp.center - center).norm();
    if (d > radius) {
      const double grown = 0.5 * (radius + d);
      center += (d - grown) / d * (sp.center - center);
      radius = grown;
    }
  }
  double enclose = 0.0;
  for (const auto& sp : s) enclose = std::max(enclose, (sp.center - center).norm() + sp.radius);
  out.center = center;
  out.radius = enclose;
  return out;
}

bool route_segment_exempt(const ProblemSpec& spec, std::size_t route, std::size_t segment,
                          std::size_t body, std::size_t sphere) {
  const Route& r = spec.routes[route];
  const auto exempt_for = [&](const PortRef& port) {
    if (port.body != body) return false;
    if (spec.route_exemption == RouteExemption::HostBody) return true;
    const Sphere& s = spec.bodies[body].spheres[sphere];
    const Vec3& p = spec.bodies[body].ports[port.port];
    return (s.center - p).norm() - s.radius <= 2.0 * r.radius + 1e-9;
  };
  if (segment == 0 && exempt_for(r.from)) return true;
  if (segment + 1 == r.n_segments() && exempt_for(r.to)) return true;
  return false;
}

namespace {

// Segments of two routes that meet at a shared port are left unconstrained,
// like adjacent segments of one route.
bool segments_share_port(const Route& ra, std::size_t ma, const Route& rb, std::size_t mb) {
  std::vector<PortRef> ends_a, ends_b;
  if (ma == 0) ends_a.push_back(ra.from);
  if (ma + 1 == ra.n_segments()) ends_a.push_back(ra.to);
  if (mb == 0) ends_b.push_back(rb.from);
  if (mb + 1 == rb.n_segments()) ends_b.push_back(rb.to);
  for (const auto& pa : ends_a) {
    for (const auto& pb : ends_b) {
      if (pa == pb) return true;
    }
  }
  return false;
}

}  // namespace

ConstraintSet::ConstraintSet(const ProblemSpec& spec, ConstraintMode mode, Empty)
    : spec_(&spec), layout_(spec.layout()), mode_(mode) {
  mode_.validate();
  std::size_t offset = 0;
  for (const auto& b : spec.bodies) {
    sphere_offsets_.push_back(offset);
    offset += b.spheres.size();
  }
}

void ConstraintSet::add_pair_rows(std::size_t i, std::size_t j) {
  const auto& bodies = spec_->bodies;
  for (std::size_t mu = 0; mu < bodies[i].spheres.size(); ++mu) {
    for (std::size_t nu = 0; nu < bodies[j].spheres.size(); ++nu) {
      terms_.push_back({ConstraintKind::ObjObj, i, mu, j, nu});
    }
  }
}

ConstraintSet ConstraintSet::body_pairs_only(const ProblemSpec& spec, ConstraintMode mode,
                                             const PairSet& pairs) {
  ConstraintSet set(spec, mode, Empty{});
  for (const auto& [i, j] : pairs) {
    if (i >= j || j >= spec.bodies.size()) throw ModelError("invalid body pair");
    set.add_pair_rows(i, j);
  }
  set.build_labels();
  return set;
}

ConstraintSet::ConstraintSet(const ProblemSpec& spec, ConstraintMode mode,
                             std::optional<PairSet> active_pairs)
    : ConstraintSet(spec, mode, Empty{}) {
  const std::size_t n = spec.bodies.size();
  if (active_pairs) {
    enclosing_.reserve(n);
    for (const auto& b : spec.bodies) enclosing_.push_back(enclosing_sphere(b));
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (active_pairs && !active_pairs->contains({i, j})) {
        terms_.push_back({ConstraintKind::Enclosing, i, j, 0, 0});
        continue;
      }
      add_pair_rows(i, j);
    }
  }
  for (std::size_t r = 0; r < spec.routes.size(); ++r) {
    for (std::size_t m = 0; m < spec.routes[r].n_segments(); ++m) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < spec.bodies[i].spheres.size(); ++s) {
          if (route_segment_exempt(spec, r, m, i, s)) continue;
          terms_.push_back({ConstraintKind::RouteObj, r, m, i, s});
        }
      }
    }
  }
  for (std::size_t r = 0; r < spec.routes.size(); ++r) {
    const Route& ra = spec.routes[r];
    for (std::size_t m = 0; m < ra.n_segments(); ++m) {
      for (std::size_t q = r; q < spec.routes.size(); ++q) {
        const Route& rb = spec.routes[q];
        for (std::size_t k = (q == r ? m + 2 : 0); k < rb.n_segments(); ++k) {
          if (segments_share_port(ra, m, rb, k)) continue;
          terms_.push_back({ConstraintKind::RouteRoute, r, m, q, k});
        }
      }
    }
  }
  build_labels();
}

void ConstraintSet::build_labels() {
  labels_.clear();
  if (mode_.kind == ConstraintModeKind::Absolute) {
    labels_.reserve(terms_.size());
    for (const auto& t : terms_) labels_.push_back({t.kind, t.a, t.b, t.c, t.d, false});
    return;
  }
  group_of_term_.resize(terms_.size());
  for (ConstraintKind kind : {ConstraintKind::ObjObj, ConstraintKind::Enclosing,
                              ConstraintKind::RouteObj, ConstraintKind::RouteRoute}) {
    std::size_t count = 0;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      if (terms_[k].kind != kind) continue;
      group_of_term_[k] = labels_.size();
      ++count;
    }
    if (count > 0) labels_.push_back({kind, count, 0, 0, 0, true});
  }
}

std::size_t ConstraintSet::term_count(ConstraintKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(terms_.begin(), terms_.end(), [&](const Term& t) { return t.kind == kind; }));
}

double ConstraintSet::term_value(const WorldFrame& frame, const Term& t) const {
  switch (t.kind) {
    case ConstraintKind::ObjObj: {
      const Vec3& ci = frame.sphere_centers(t.a)[t.b];
      const Vec3& cj = frame.sphere_centers(t.c)[t.d];
      return -(guarded_norm(ci - cj) - frame.sphere_radius(t.a, t.b) -
               frame.sphere_radius(t.c, t.d));
    }
    case ConstraintKind::Enclosing: {
      const Vec3 ci = frame.world_point(t.a, enclosing_[t.a].center);
      const Vec3 cj = frame.world_point(t.b, enclosing_[t.b].center);
      return -(guarded_norm(ci - cj) - enclosing_[t.a].radius - enclosing_[t.b].radius);
    }
    case ConstraintKind::RouteObj: {
      const auto nodes = frame.route_nodes(t.a);
      const Sphere s{frame.sphere_centers(t.c)[t.d], frame.sphere_radius(t.c, t.d)};
      return -segment_sphere_clearance(nodes[t.b], nodes[t.b + 1], s, frame.route(t.a).radius);
    }
    case ConstraintKind::RouteRoute: {
      const auto na = frame.route_nodes(t.a);
      const auto nb = frame.route_nodes(t.c);
      return -segment_segment_clearance(na[t.b], na[t.b + 1], nb[t.d], nb[t.d + 1],
                                        frame.route(t.a).radius, frame.route(t.c).radius);
    }
  }
  return 0.0;
}

void ConstraintSet::term_gradient(const WorldFrame& frame, const Term& t, double w,
                                  std::vector<Vec3>& sphere_grad,
                                  std::vector<std::vector<Vec3>>& node_grad,
                                  std::vector<Vec3>& enclosing_grad) const {
  switch (t.kind) {
    case ConstraintKind::ObjObj: {
      const Vec3 diff = frame.sphere_centers(t.a)[t.b] - frame.sphere_centers(t.c)[t.d];
      const Vec3 u = diff / guarded_norm(diff);
      sphere_grad[sphere_offsets_[t.a] + t.b] -= w * u;
      sphere_grad[sphere_offsets_[t.c] + t.d] += w * u;
      return;
    }
    case ConstraintKind::Enclosing: {
      const Vec3 diff = frame.world_point(t.a, enclosing_[t.a].center) -
                        frame.world_point(t.b, enclosing_[t.b].center);
      const Vec3 u = diff / guarded_norm(diff);
      enclosing_grad[t.a] -= w * u;
      enclosing_grad[t.b] += w * u;
      return;
    }
    case ConstraintKind::RouteObj: {
      const auto nodes = frame.route_nodes(t.a);
      const Vec3& p0 = nodes[t.b];
      const Vec3& p1 = nodes[t.b + 1];
      const Vec3& c = frame.sphere_centers(t.c)[t.d];
      const double s = closest_segment_parameter(p0, p1, c);
      const Vec3 diff = c - (p0 + s * (p1 - p0));
      const Vec3 u = diff / guarded_norm(diff);
      sphere_grad[sphere_offsets_[t.c] + t.d] -= w * u;
      node_grad[t.a][t.b] += w * (1.0 - s) * u;
      node_grad[t.a][t.b + 1] += w * s * u;
      return;
    }
    case ConstraintKind::RouteRoute: {
      const auto na = frame.route_nodes(t.a);
      const auto nb = frame.route_nodes(t.c);
      const auto [s, r] = closest_segment_parameters(na[t.b], na[t.b + 1], nb[t.d], nb[t.d + 1]);
      const Vec3 diff = (na[t.b] + s * (na[t.b + 1] - na[t.b])) -
                        (nb[t.d] + r * (nb[t.d + 1] - nb[t.d]));
      const Vec3 u = diff / guarded_norm(diff);
      node_grad[t.a][t.b] -= w * (1.0 - s) * u;
      node_grad[t.a][t.b + 1] -= w * s * u;
      node_grad[t.c][t.d] += w * (1.0 - r) * u;
      node_grad[t.c][t.d + 1] += w * r * u;
      return;
    }
  }
}

VecX ConstraintSet::term_values(const WorldFrame& frame) const {
  VecX g(terms_.size());
  for (std::size_t k = 0; k < terms_.size(); ++k) g[k] = term_value(frame, terms_[k]);
  return g;
}

VecX ConstraintSet::evaluate(const WorldFrame& frame) const {
  VecX raw = term_values(frame);
  if (mode_.kind == ConstraintModeKind::Absolute) return raw;
  VecX rows = VecX::Zero(labels_.size());
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    rows[group_of_term_[k]] += softplus(mode_.beta * raw[k]) / mode_.beta;
  }
  rows.array() -= mode_.epsilon;
  return rows;
}

VecX ConstraintSet::evaluate(const VecX& x) const {
  return evaluate(spec_->frame(layout_, x));
}

void ConstraintSet::accumulate_gradient(const WorldFrame& frame, const VecX& weights,
                                        VecX& grad) const {
  if (static_cast<std::size_t>(weights.size()) != labels_.size()) {
    throw DimensionError("constraint weights have the wrong length");
  }
  std::vector<Vec3> sphere_grad(frame.total_spheres(), Vec3::Zero());
  std::vector<std::vector<Vec3>> node_grad(frame.n_routes());
  for (std::size_t r = 0; r < frame.n_routes(); ++r) {
    node_grad[r].assign(frame.route(r).n_nodes(), Vec3::Zero());
  }
  std::vector<Vec3> enclosing_grad(frame.n_bodies(), Vec3::Zero());

  const bool soft = mode_.kind == ConstraintModeKind::SoftSum;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    double w = 0.0;
    if (soft) {
      const double row_w = weights[group_of_term_[k]];
      if (row_w == 0.0) continue;
      w = row_w * logistic(mode_.beta * term_value(frame, terms_[k]));
    } else {
      w = weights[k];
    }
    if (w == 0.0) continue;
    term_gradient(frame, terms_[k], w, sphere_grad, node_grad, enclosing_grad);
  }

  for (std::size_t i = 0; i < frame.n_bodies(); ++i) {
    const auto& spheres = frame.body(i).spheres;
    const std::size_t o = layout_.pose_offset(i);
    const auto& jet = frame.rotation(i);
    Vec3 total = Vec3::Zero();
    // Collapse sum_s partial_a * p_s . g_s into one pass per angle.
    Mat3 moment = Mat3::Zero();
    for (std::size_t s = 0; s < spheres.size(); ++s) {
      const Vec3& g = sphere_grad[sphere_offsets_[i] + s];
      total += g;
      moment += g * spheres[s].center.transpose();
    }
    if (!enclosing_.empty()) {
      total += enclosing_grad[i];
      moment += enclosing_grad[i] * enclosing_[i].center.transpose();
    }
    for (int a = 0; a < 3; ++a) grad[o + a] += (jet.partials[a].cwiseProduct(moment)).sum();
    grad.segment<3>(o + 3) += total;
  }
  for (std::size_t r = 0; r < frame.n_routes(); ++r) {
    for (std::size_t m = 0; m < node_grad[r].size(); ++m) {
      if (!node_grad[r][m].isZero(0.0)) frame.add_route_node_gradient(r, m, node_grad[r][m], grad);
    }
  }
}

void ConstraintSet::accumulate_gradient(const VecX& x, const VecX& weights, VecX& grad) const {
  accumulate_gradient(spec_->frame(layout_, x), weights, grad);
}

ConstraintVector assemble(const VecX& x, const ProblemSpec& spec,
                          const std::optional<PairSet>& active_pairs, ConstraintMode mode) {
  spec.layout().check(x);
  const ConstraintSet set(spec, mode, active_pairs);
  return ConstraintVector{set.evaluate(x), set.labels()};
}

double min_body_clearance(const ProblemSpec& spec, const VecX& x) {
  const DesignLayout layout = spec.layout();
  const WorldFrame frame = spec.frame(layout, x);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.bodies.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.bodies.size(); ++j) {
      const auto ci = frame.sphere_centers(i);
      const auto cj = frame.sphere_centers(j);
      for (std::size_t a = 0; a < ci.size(); ++a) {
        for (std::size_t b = 0; b < cj.size(); ++b) {
          best = std::min(best, (ci[a] - cj[b]).norm() - frame.sphere_radius(i, a) -
                                    frame.sphere_radius(j, b));
        }
      }
    }
  }
  return best;
}

double full_constraint_violation(const ProblemSpec& spec, const VecX& x) {
  const ConstraintSet set(spec, ConstraintMode{});
  const VecX g = set.evaluate(x);
  return g.size() == 0 ? 0.0 : std::max(0.0, g.maxCoeff());
}

}  // namespace spi2
