#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spi2/boundary.hpp"
#include "spi2/objectives.hpp"
#include "spi2/physics.hpp"
#include "spi2/solver.hpp"

using namespace spi2;

TEST_SUITE("objectives") {

TEST_CASE("routing lengths match the polyline oracle") {
  oracle::Rng rng(61);
  const ProblemSpec spec = oracle::random_spec(rng, 3, 3, 3, 2);
  for (int k = 0; k < 20; ++k) {
    const VecX x = oracle::random_x(rng, spec);
    CHECK(routing_length_sq(x, spec) == doctest::Approx(oracle::routing_squared(spec, x)).epsilon(1e-13));
    CHECK(routing_length_linear(x, spec) == doctest::Approx(oracle::routing_linear(spec, x)).epsilon(1e-13));
  }
}

TEST_CASE("exponential routing is capped") {
  ProblemSpec spec;
  Body b;
  b.id = "b";
  b.spheres = {{Vec3::Zero(), 0.1}};
  b.ports = {Vec3::Zero()};
  spec.bodies = {b, b};
  spec.bodies[1].id = "c";
  spec.routes.push_back(Route{"r", {0, 0}, {1, 0}, 0, 0.0});
  VecX x = VecX::Zero(12);
  x[9] = 2.0;  // segment length 2
  CHECK(routing_exponential(x, spec, 1.0) == doctest::Approx(std::expm1(4.0)));
  x[9] = 100.0;
  VecX grad = VecX::Zero(12);
  CHECK(routing_exponential(x, spec, 1.0, &grad) == std::expm1(kExponentCap));
  CHECK(grad.norm() == 0.0);
}

TEST_CASE("smooth AABB never exceeds the exact AABB") {
  oracle::Rng rng(62);
  const ProblemSpec spec = oracle::random_spec(rng, 3, 5, 0, 0);
  for (int k = 0; k < 200; ++k) {
    const VecX x = oracle::random_x(rng, spec);
    const double exact = exact_aabb_volume(x, spec);
    CHECK(exact == doctest::Approx(oracle::aabb_volume(spec, x)).epsilon(1e-13));
    CHECK(smooth_aabb_volume(x, spec, 50.0) <= exact + 1e-12);
    // Large alpha converges to the exact box.
    CHECK(smooth_aabb_volume(x, spec, 1e4) == doctest::Approx(exact).epsilon(1e-2));
  }
}

TEST_CASE("mean pairwise distance over bodies") {
  ProblemSpec spec;
  Body b;
  b.id = "b";
  b.spheres = {{Vec3::Zero(), 0.1}};
  spec.bodies = {b, b, b};
  VecX x = VecX::Zero(18);
  x[3] = 0.0;
  x[9] = 3.0;
  x[16] = 4.0;
  // Pairs: (0,1)=3, (0,2)=4, (1,2)=5.
  CHECK(mean_pairwise_distance(x, spec) == doctest::Approx(4.0));
  spec.bodies.resize(1);
  CHECK_THROWS_AS(mean_pairwise_distance(VecX::Zero(6), spec), ModelError);
}

TEST_CASE("total objective is the weighted sum of its terms") {
  oracle::Rng rng(63);
  ProblemSpec spec = oracle::random_spec(rng, 3, 3, 2, 1);
  spec.boundary = unit_cube_boundary(BoundaryBuildOptions{8, 100, 200, 1.0, 5}).model;
  ObjectiveWeights w;
  w.routing = 0.7;
  w.boundary = 0.3;
  w.cog = 1.1;
  w.inertia = 0.2;
  w.volume = 0.9;
  w.mean_distance = 0.4;
  spec.cog_target = Vec3(0.1, 0.2, 0.3);
  const VecX x = oracle::random_x(rng, spec);
  const ObjectiveBreakdown b = total_objective(x, spec, w);
  CHECK(b.routing == doctest::Approx(routing_length_sq(x, spec)));
  CHECK(b.volume == doctest::Approx(smooth_aabb_volume(x, spec, w.alpha_volume)));
  CHECK(b.cog == doctest::Approx(f_cog(x, spec, spec.cog_target)));
  CHECK(b.inertia == doctest::Approx(f_inertia(x, spec, w.inertia_axes)));
  CHECK(b.mean_distance == doctest::Approx(mean_pairwise_distance(x, spec)));
  CHECK(b.boundary == doctest::Approx(boundary_objective(x, spec, *spec.boundary)));
  const double sum = w.routing * b.routing + w.boundary * b.boundary + w.cog * b.cog +
                     w.inertia * b.inertia + w.volume * b.volume + w.mean_distance * b.mean_distance;
  CHECK(b.total == doctest::Approx(sum).epsilon(1e-14));

  ObjectiveWeights zero;
  zero.volume = 1.0;
  const ObjectiveBreakdown z = total_objective(x, spec, zero);
  CHECK(z.routing == 0.0);
  CHECK(z.cog == 0.0);
  CHECK(z.total == z.volume);
}

TEST_CASE("objective gradients") {
  oracle::Rng rng(64);
  ProblemSpec spec = oracle::random_spec(rng, 3, 3, 2, 2);
  for (int k = 0; k < 10; ++k) {
    const VecX x = oracle::random_x(rng, spec, 1.5);
    const auto check = [&](auto fn) {
      VecX grad = VecX::Zero(x.size());
      fn(x, &grad);
      return check_gradient([&](const VecX& v) { return fn(v, nullptr); }, grad, x);
    };
    CHECK(check([&](const VecX& v, VecX* g) { return routing_length_sq(v, spec, g); }) < 1e-6);
    CHECK(check([&](const VecX& v, VecX* g) { return routing_exponential(v, spec, 0.1, g); }) < 1e-5);
    CHECK(check([&](const VecX& v, VecX* g) { return smooth_aabb_volume(v, spec, 20.0, g); }) < 1e-5);
    CHECK(check([&](const VecX& v, VecX* g) { return mean_pairwise_distance(v, spec, g); }) < 1e-6);
    ObjectiveWeights w = objective_preset("f2");
    w.cog = 0.5;
    w.inertia = 0.1;
    w.gamma = 0.05;
    CHECK(check([&](const VecX& v, VecX* g) { return total_objective(v, spec, w, g).total; }) < 1e-5);
  }
}

TEST_CASE("presets") {
  CHECK(objective_preset("f1").routing_variant == RoutingVariant::Quadratic);
  CHECK(objective_preset("f2").routing_variant == RoutingVariant::Exponential);
  CHECK(objective_preset("f3").volume == 1.0);
  CHECK_THROWS_AS(objective_preset("f9"), ModelError);
}

}  // TEST_SUITE
