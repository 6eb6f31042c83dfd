#pragma once

// Clearance constraints between bodies, route segments and enclosing
// spheres, assembled into g(x) <= 0 with optional soft-sum aggregation.

#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spi2/problem.hpp"

namespace spi2 {

/// Signed gap between two spheres; negative when they overlap.
double sphere_clearance(const Sphere& a, const Sphere& b);

/// Distance from the sphere center to the closed segment [p0, p1] minus the
/// sphere radius and the tube radius.
double segment_sphere_clearance(const Vec3& p0, const Vec3& p1, const Sphere& s, double tube_radius);

/// Minimum distance between two closed segments minus both tube radii.
double segment_segment_clearance(const Vec3& a0, const Vec3& a1, const Vec3& b0, const Vec3& b1,
                                 double tube_a, double tube_b);

/// Closest point on [p0, p1] to `p`, as the clamped segment parameter.
double closest_segment_parameter(const Vec3& p0, const Vec3& p1, const Vec3& p);

/// Closest-point parameters (s, t) between [a0, a1] and [b0, b1]; degenerate
/// segments collapse to points.
std::pair<double, double> closest_segment_parameters(const Vec3& a0, const Vec3& a1,
                                                     const Vec3& b0, const Vec3& b1);

/// Number of sphere-pair rows between distinct bodies: sum_{i<j} n_i n_j.
std::size_t pair_count(std::span<const std::size_t> sphere_counts);

enum class ConstraintKind { ObjObj, RouteObj, RouteRoute, Enclosing };

std::string to_string(ConstraintKind kind);

/// Row descriptor. Index meaning by kind:
///   ObjObj     (body i, sphere, body j, sphere)
///   RouteObj   (route, segment, body, sphere)
///   RouteRoute (route, segment, route, segment)
///   Enclosing  (body i, body j, -, -)
/// Soft-sum rows set `aggregate` and carry the number of terms in `a`.
struct ConstraintLabel {
  ConstraintKind kind = ConstraintKind::ObjObj;
  std::size_t a = 0, b = 0, c = 0, d = 0;
  bool aggregate = false;
};

struct ConstraintVector {
  VecX values;
  std::vector<ConstraintLabel> labels;

  /// max(0, max_k g_k); zero for an empty vector.
  double max_violation() const;
};

using BodyPair = std::pair<std::size_t, std::size_t>;
using PairSet = std::set<BodyPair>;

/// Enclosing ball of a body in its local frame.
struct EnclosingSphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Ritter's bounding sphere over the sphere centers, with the radius grown so
/// every member sphere is fully enclosed.
EnclosingSphere enclosing_sphere(const Body& body);

/// The row structure of g(x) for one problem. Rows are fixed at
/// construction; evaluation is pure and thread-safe.
///
/// With `active_pairs` set, detailed sphere rows exist only for listed body
/// pairs and every other pair gets a single enclosing-sphere row.
class ConstraintSet {
 public:
  ConstraintSet(const ProblemSpec& spec, ConstraintMode mode,
                std::optional<PairSet> active_pairs = std::nullopt);

  /// Only the detailed obj-obj rows of the listed body pairs; no route rows.
  static ConstraintSet body_pairs_only(const ProblemSpec& spec, ConstraintMode mode,
                                       const PairSet& pairs);

  std::size_t size() const { return labels_.size(); }
  const std::vector<ConstraintLabel>& labels() const { return labels_; }
  std::size_t term_count(ConstraintKind kind) const;
  std::size_t term_count() const { return terms_.size(); }
  const std::vector<EnclosingSphere>& enclosing_spheres() const { return enclosing_; }

  VecX evaluate(const WorldFrame& frame) const;
  VecX evaluate(const VecX& x) const;

  /// grad += J(x)^T weights.
  void accumulate_gradient(const WorldFrame& frame, const VecX& weights, VecX& grad) const;
  void accumulate_gradient(const VecX& x, const VecX& weights, VecX& grad) const;

  /// Raw (un-aggregated) clearance rows -d_k, one per term.
  VecX term_values(const WorldFrame& frame) const;

 private:
  struct Term {
    ConstraintKind kind;
    std::size_t a, b, c, d;
  };

  struct Empty {};
  ConstraintSet(const ProblemSpec& spec, ConstraintMode mode, Empty);
  void add_pair_rows(std::size_t i, std::size_t j);
  void build_labels();

  double term_value(const WorldFrame& frame, const Term& t) const;
  void term_gradient(const WorldFrame& frame, const Term& t, double w,
                     std::vector<Vec3>& sphere_grad, std::vector<std::vector<Vec3>>& node_grad,
                     std::vector<Vec3>& enclosing_grad) const;

  const ProblemSpec* spec_;
  DesignLayout layout_;
  ConstraintMode mode_;
  std::vector<Term> terms_;
  std::vector<ConstraintLabel> labels_;
  std::vector<std::size_t> group_of_term_;  // soft-sum row per term
  std::vector<std::size_t> sphere_offsets_;
  std::vector<EnclosingSphere> enclosing_;
};

/// Route-obj exemption test: true when segment `segment` of `route` ignores
/// sphere `sphere` of body `body`.
bool route_segment_exempt(const ProblemSpec& spec, std::size_t route, std::size_t segment,
                          std::size_t body, std::size_t sphere);

/// One-shot assembly of g(x) with labels.
ConstraintVector assemble(const VecX& x, const ProblemSpec& spec,
                          const std::optional<PairSet>& active_pairs, ConstraintMode mode);

/// Smallest sphere-to-sphere clearance between distinct bodies at x.
double min_body_clearance(const ProblemSpec& spec, const VecX& x);

/// Worst Absolute-mode violation over every row of the full constraint set.
double full_constraint_violation(const ProblemSpec& spec, const VecX& x);

}  // namespace spi2
