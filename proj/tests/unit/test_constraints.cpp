#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spi2/constraints.hpp"
#include "spi2/smooth.hpp"
#include "spi2/solver.hpp"

using namespace spi2;

namespace {

// One scalar function per row so each row's gradient can be checked alone.
double worst_row_gradient_error(const ConstraintSet& set, const VecX& x) {
  double worst = 0.0;
  for (std::size_t row = 0; row < set.size(); ++row) {
    VecX w = VecX::Zero(static_cast<Eigen::Index>(set.size()));
    w[static_cast<Eigen::Index>(row)] = 1.0;
    VecX grad = VecX::Zero(x.size());
    set.accumulate_gradient(x, w, grad);
    const auto f = [&](const VecX& v) { return set.evaluate(v)[static_cast<Eigen::Index>(row)]; };
    worst = std::max(worst, check_gradient(f, grad, x));
  }
  return worst;
}

}  // namespace

TEST_SUITE("constraints") {

TEST_CASE("sphere clearance") {
  CHECK(sphere_clearance({Vec3::Zero(), 1.0}, {Vec3(3, 0, 0), 1.0}) == doctest::Approx(1.0));
  CHECK(sphere_clearance({Vec3::Zero(), 1.0}, {Vec3(1, 0, 0), 1.0}) == doctest::Approx(-1.0));
}

TEST_CASE("segment distances agree with the ternary-search oracle") {
  oracle::Rng rng(21);
  for (int k = 0; k < 2000; ++k) {
    const Vec3 a0 = rng.vec3(-1, 1), a1 = rng.vec3(-1, 1), b0 = rng.vec3(-1, 1), b1 = rng.vec3(-1, 1);
    const double ref = oracle::segment_distance(a0, a1, b0, b1);
    CHECK(segment_segment_clearance(a0, a1, b0, b1, 0.0, 0.0) == doctest::Approx(ref).epsilon(1e-7));
    CHECK(segment_segment_clearance(a0, a1, b0, b1, 0.1, 0.2) ==
          doctest::Approx(ref - 0.3).epsilon(1e-7));
    const Vec3 q = rng.vec3(-1, 1);
    CHECK(segment_sphere_clearance(a0, a1, {q, 0.1}, 0.05) ==
          doctest::Approx((q - oracle::point_on_segment(a0, a1, q)).norm() - 0.15).epsilon(1e-12));
  }
}

TEST_CASE("segment distances handle parallel and degenerate segments") {
  const Vec3 o = Vec3::Zero(), ex = Vec3::UnitX();
  CHECK(segment_segment_clearance(o, ex, Vec3(0, 1, 0), Vec3(1, 1, 0), 0, 0) == doctest::Approx(1.0));
  CHECK(segment_segment_clearance(o, ex, Vec3(2, 0, 0), Vec3(3, 0, 0), 0, 0) == doctest::Approx(1.0));
  CHECK(segment_segment_clearance(o, o, Vec3(0, 2, 0), Vec3(0, 2, 0), 0, 0) == doctest::Approx(2.0));
  CHECK(closest_segment_parameter(o, o, ex) == 0.0);
}

TEST_CASE("pair count formula") {
  const std::vector<std::size_t> homo{100, 100, 100};
  CHECK(pair_count(homo) == 30000);
  oracle::Rng rng(22);
  for (int k = 0; k < 50; ++k) {
    std::vector<std::size_t> counts(1 + rng.index(6));
    for (auto& c : counts) c = 1 + rng.index(30);
    CHECK(pair_count(counts) == oracle::pair_rows(counts));
  }
  CHECK(pair_count(std::vector<std::size_t>{}) == 0);
}

TEST_CASE("row structure of the full set") {
  oracle::Rng rng(23);
  ProblemSpec spec = oracle::random_spec(rng, 3, 4, 0, 0);
  const ConstraintSet set(spec, ConstraintMode{});
  CHECK(set.size() == 3 * 16);
  CHECK(set.term_count(ConstraintKind::ObjObj) == 48);
  CHECK(set.term_count(ConstraintKind::Enclosing) == 0);

  // Active pairs: one detailed pair, enclosing rows for the other two.
  const ConstraintSet partial(spec, ConstraintMode{}, PairSet{{0, 2}});
  CHECK(partial.term_count(ConstraintKind::ObjObj) == 16);
  CHECK(partial.term_count(ConstraintKind::Enclosing) == 2);

  const ConstraintSet only = ConstraintSet::body_pairs_only(spec, ConstraintMode{}, PairSet{{1, 2}});
  CHECK(only.size() == 16);
  CHECK_THROWS_AS(ConstraintSet::body_pairs_only(spec, ConstraintMode{}, PairSet{{2, 1}}), ModelError);
}

TEST_CASE("two five-sphere bodies give 25 detailed rows") {
  oracle::Rng rng(24);
  ProblemSpec spec = oracle::random_spec(rng, 2, 5, 0, 0);
  CHECK(ConstraintSet(spec, ConstraintMode{}).size() == 25);
}

TEST_CASE("absolute rows equal negative clearances") {
  oracle::Rng rng(25);
  const ProblemSpec spec = oracle::random_spec(rng, 3, 4, 0, 0);
  const ConstraintSet set(spec, ConstraintMode{});
  for (int k = 0; k < 20; ++k) {
    const VecX x = oracle::random_x(rng, spec);
    const VecX g = set.evaluate(x);
    CHECK(-g.maxCoeff() == doctest::Approx(oracle::min_body_clearance(spec, x)).epsilon(1e-12));
    CHECK(full_constraint_violation(spec, x) == doctest::Approx(std::max(0.0, g.maxCoeff())));
    CHECK(min_body_clearance(spec, x) == doctest::Approx(oracle::min_body_clearance(spec, x)));
  }
}

TEST_CASE("route rows skip adjacent segments and exempt port spheres") {
  oracle::Rng rng(26);
  ProblemSpec spec = oracle::random_spec(rng, 2, 8, 2, 3);
  const ConstraintSet set(spec, ConstraintMode{});
  for (const auto& l : set.labels()) {
    if (l.kind == ConstraintKind::RouteRoute && l.a == l.c) CHECK(l.d >= l.b + 2);
    if (l.kind == ConstraintKind::RouteObj) CHECK_FALSE(route_segment_exempt(spec, l.a, l.b, l.c, l.d));
  }
  spec.route_exemption = RouteExemption::HostBody;
  // Host exemption drops every sphere of the port's body on the end segments.
  for (std::size_t s = 0; s < spec.bodies[0].spheres.size(); ++s) {
    CHECK(route_segment_exempt(spec, 0, 0, 0, s));
    CHECK_FALSE(route_segment_exempt(spec, 0, 1, 0, s));
  }
}

TEST_CASE("soft-sum rows bound the worst absolute row") {
  oracle::Rng rng(27);
  const ProblemSpec spec = oracle::random_spec(rng, 3, 4, 1, 1);
  ConstraintMode soft;
  soft.kind = ConstraintModeKind::SoftSum;
  soft.beta = 30.0;
  soft.epsilon = 1e-3;
  const ConstraintSet agg(spec, soft);
  const ConstraintSet abs(spec, ConstraintMode{});
  CHECK(agg.size() <= 4);
  for (const auto& l : agg.labels()) CHECK(l.aggregate);
  for (int k = 0; k < 20; ++k) {
    const VecX x = oracle::random_x(rng, spec);
    const VecX gs = agg.evaluate(x);
    const VecX ga = abs.evaluate(x);
    // softplus(b v)/b >= max(v, 0), so every soft row exceeds its worst term minus epsilon.
    std::size_t t = 0;
    for (std::size_t row = 0; row < agg.size(); ++row) {
      double worst = -1e300;
      for (std::size_t k2 = 0; k2 < agg.labels()[row].a; ++k2, ++t) worst = std::max(worst, ga[t]);
      CHECK(gs[row] >= std::max(worst, 0.0) - soft.epsilon - 1e-12);
    }
  }
}

TEST_CASE("enclosing sphere contains every member sphere") {
  oracle::Rng rng(28);
  for (int k = 0; k < 50; ++k) {
    const Body b = oracle::random_body(rng, 1 + rng.index(20), "b");
    const EnclosingSphere e = enclosing_sphere(b);
    for (const auto& s : b.spheres) CHECK((s.center - e.center).norm() + s.radius <= e.radius + 1e-12);
  }
}

TEST_CASE("constraint gradients match finite differences") {
  oracle::Rng rng(29);
  const ProblemSpec spec = oracle::random_spec(rng, 3, 3, 2, 2);
  ConstraintMode soft;
  soft.kind = ConstraintModeKind::SoftSum;
  for (int k = 0; k < 5; ++k) {
    const VecX x = oracle::random_x(rng, spec);
    CHECK(worst_row_gradient_error(ConstraintSet(spec, ConstraintMode{}), x) < 1e-5);
    CHECK(worst_row_gradient_error(ConstraintSet(spec, soft), x) < 1e-5);
    CHECK(worst_row_gradient_error(ConstraintSet(spec, ConstraintMode{}, PairSet{{0, 1}}), x) < 1e-5);
  }
}

TEST_CASE("weights of the wrong length are rejected") {
  oracle::Rng rng(30);
  const ProblemSpec spec = oracle::random_spec(rng, 2, 2, 0, 0);
  const ConstraintSet set(spec, ConstraintMode{});
  VecX grad = VecX::Zero(12);
  CHECK_THROWS_AS(set.accumulate_gradient(VecX::Zero(12), VecX::Zero(3), grad), DimensionError);
}

}  // TEST_SUITE
