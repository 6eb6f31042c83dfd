#include <doctest.h>

#include <string>

#include <json.hpp>

#include "oracles.hpp"
#include "spi2/benchmarks.hpp"
#include "spi2/constraints.hpp"
#include "spi2/objectives.hpp"
#include "spi2/scene_io.hpp"

using namespace spi2;

TEST_SUITE("scene_io") {

TEST_CASE("scene round trip is exact") {
  for (const auto& id : {"unique", "tail-demo", "lshape-2"}) {
    CAPTURE(id);
    const ProblemSpec spec = make_benchmark(id, 12);
    SceneSettings s;
    s.restarts = 3;
    s.seed = 99;
    s.init = "es";
    const std::string text = scene_to_string(spec, &s);
    const SceneFile back = scene_from_string(text);
    CHECK(scene_to_string(back.spec, &back.settings) == text);
    CHECK(back.settings.restarts == 3u);
    CHECK(back.settings.seed == 99u);
    oracle::Rng rng(101);
    const VecX x = oracle::random_x(rng, spec);
    CHECK(full_constraint_violation(spec, x) == full_constraint_violation(back.spec, x));
    CHECK(total_objective(x, spec).total == total_objective(x, back.spec).total);
  }
}

TEST_CASE("random specs survive the round trip") {
  oracle::Rng rng(102);
  for (int k = 0; k < 20; ++k) {
    const ProblemSpec spec = oracle::random_spec(rng, 2 + rng.index(3), 4, rng.index(3), 1);
    const std::string text = scene_to_string(spec);
    CHECK(scene_to_string(scene_from_string(text).spec) == text);
  }
}

TEST_CASE("field diagnostics") {
  auto j = nlohmann::json::parse(scene_to_string(make_benchmark("cuboid-2", 6)));
  j["problem"]["bodies"][1]["spheres"][3] = "wide";
  try {
    scene_from_string(j.dump(2));
    FAIL("expected SceneError");
  } catch (const SceneError& e) {
    CHECK(e.field().find("bodies[1].spheres[3]") != std::string::npos);
  }
  j = nlohmann::json::parse(scene_to_string(make_benchmark("cuboid-2", 6)));
  j["problem"]["routes"][0]["radius"] = "thin";
  CHECK_THROWS_AS(scene_from_string(j.dump()), SceneError);
  try {
    scene_from_string("{\n  \"format\": \"spi2-scene\",\n  \"version\": 1,\n  oops\n}");
    FAIL("expected SceneError");
  } catch (const SceneError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(scene_from_string("{\"format\": \"spi2-scene\", \"version\": 7, \"problem\": {}}"),
                  SceneError);
}

TEST_CASE("result replay is bit identical; timings are opt-in") {
  const ProblemSpec spec = make_benchmark("cuboid-2", 6);
  InitMethod init;
  init.seed = 4;
  NestedOptions opt;
  opt.restarts = 1;
  const NestedResult r = nested_solve(spec, init, opt);
  RunInfo info;
  info.seed = 4;
  const std::string plain = result_to_string(spec, r.best, info);
  CHECK(plain.find("wall_time") == std::string::npos);
  CHECK(result_to_string(spec, r.best, info) == plain);
  CHECK(result_to_string(spec, r.best, info, ResultOptions{true}).find("wall_time") != std::string::npos);

  const LoadedResult loaded = result_from_string(plain);
  CHECK(loaded.x == r.best.x_opt);
  CHECK(loaded.f_opt == r.best.f_opt);
  CHECK(loaded.termination == r.best.termination);
  const ReplayCheck check = replay(loaded);
  CHECK(check.identical());
}

}  // TEST_SUITE
