#include <doctest.h>

#include "oracles.hpp"
#include "spi2/boundary.hpp"
#include "spi2/solver.hpp"

using namespace spi2;

namespace {

ProblemSpec single_sphere_spec(double radius) {
  ProblemSpec spec;
  Body b;
  b.id = "probe";
  b.spheres = {{Vec3::Zero(), radius}};
  b.inertia_local = 0.4 * radius * radius * Mat3::Identity();
  spec.bodies.push_back(b);
  return spec;
}

VecX at(const Vec3& p) {
  VecX x = VecX::Zero(6);
  x.tail<3>() = p;
  return x;
}

}  // namespace

TEST_SUITE("boundary") {

TEST_CASE("signed distances") {
  const Sphere b{Vec3::Zero(), 1.0};
  CHECK(phi(b, Vec3(0.5, 0, 0)) == doctest::Approx(-0.5));
  CHECK(phi(b, Vec3(2, 0, 0)) == doctest::Approx(1.0));
  CHECK(rho(Vec3(2, 0, 0), {Vec3::Zero(), 0.5}) == doctest::Approx(1.5));
  CHECK(rho(Vec3(0.2, 0, 0), {Vec3::Zero(), 0.5}) == doctest::Approx(-0.3));
}

TEST_CASE("unit cube fixture covers its interior") {
  const BoundaryFixture f = unit_cube_boundary();
  CHECK(f.model.spheres.size() > 1);
  CHECK(f.model.surface_points.size() == 600);
  for (const auto& q : f.model.surface_points) {
    CHECK(q.cwiseAbs().maxCoeff() == doctest::Approx(0.5).epsilon(1e-12));
  }
  for (const auto& s : f.model.spheres) {
    CHECK((s.center.cwiseAbs().array() + s.radius <= 0.5 + 1e-12).all());
  }
  // Disjoint balls leave the corners and edges uncovered.
  CHECK(f.coverage.uncovered_fraction() < 0.4);
}

TEST_CASE("penalty separates inside from outside") {
  const BoundaryFixture f = unit_cube_boundary();
  const double inside = boundary_sphere_penalty(f.model, {Vec3::Zero(), 0.1});
  const double outside = boundary_sphere_penalty(f.model, {Vec3(1.5, 0, 0), 0.1});
  const double straddling = boundary_sphere_penalty(f.model, {Vec3(0.45, 0, 0), 0.1});
  CHECK(inside < 0.1);
  CHECK(outside > 1.0);
  CHECK(straddling > inside);
}

TEST_CASE("hard inclusion check") {
  const BoundaryFixture f = unit_cube_boundary();
  const ProblemSpec spec = single_sphere_spec(0.1);
  const InclusionResult in = hard_inclusion_check(at(Vec3::Zero()), spec, f.model);
  CHECK(in.inside);
  CHECK(in.inside_fraction() == 1.0);
  const InclusionResult out = hard_inclusion_check(at(Vec3(0.49, 0, 0)), spec, f.model);
  CHECK_FALSE(out.inside);
  CHECK(out.spheres_inside == 0);
  CHECK(out.spheres_total == 1);
}

TEST_CASE("boundary objective gradient") {
  const BoundaryFixture f = unit_cube_boundary(BoundaryBuildOptions{8, 200, 400, 1.0, 3});
  oracle::Rng rng(41);
  ProblemSpec spec = oracle::random_spec(rng, 2, 4, 0, 0);
  for (auto& b : spec.bodies) {
    for (auto& s : b.spheres) {
      s.center *= 0.3;
      s.radius *= 0.2;
    }
  }
  spec.boundary = f.model;
  for (int k = 0; k < 10; ++k) {
    const VecX x = oracle::random_x(rng, spec, 0.6);
    VecX grad = VecX::Zero(x.size());
    boundary_objective(x, spec, f.model, &grad);
    const auto fn = [&](const VecX& v) { return boundary_objective(v, spec, f.model); };
    CHECK(check_gradient(fn, grad, x) < 1e-5);
  }
}

TEST_CASE("frustum fixture samples its surface") {
  const FrustumSolid cone(1.5, 0.8, 6.0);
  const BoundaryFixture f = build_boundary(cone);
  for (const auto& q : f.model.surface_points) CHECK(std::abs(cone.interior_distance(q)) < 1e-9);
  for (const auto& s : f.model.spheres) CHECK(cone.interior_distance(s.center) >= s.radius - 1e-9);
}

TEST_CASE("invalid grids are rejected") {
  CHECK_THROWS_AS(unit_cube_boundary(BoundaryBuildOptions{1}), ModelError);
}

}  // TEST_SUITE
