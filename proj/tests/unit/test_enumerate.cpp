#include <doctest.h>

#include <set>

#include "spi2/enumerate.hpp"

using namespace spi2;

TEST_SUITE("enumerate") {

TEST_CASE("axis rotations") {
  const auto rot = axis_rotations();
  CHECK(rot.size() == 24);
  std::set<std::vector<int>> seen;
  for (const auto& r : rot) {
    CHECK(r.determinant() == 1);
    CHECK(r * r.transpose() == Eigen::Matrix3i::Identity());
    seen.insert(std::vector<int>(r.data(), r.data() + 9));
  }
  CHECK(seen.size() == 24);
  const auto all = axis_rotations(true);
  CHECK(all.size() == 48);
}

TEST_CASE("small benchmarks have optimal grid layouts") {
  for (const auto& id : {"cuboid-2", "lshape-2", "unique"}) {
    CAPTURE(id);
    const EnumerationResult r = enumerate_discrete_optima(id);
    CHECK(r.count >= 1);
    CHECK(r.symmetry_classes >= 1);
    CHECK(r.symmetry_classes <= r.count);
    CHECK(r.boxes >= 1);
  }
  // Two 1x1x2 blocks in a 2x2x1 box with both ports side by side.
  CHECK(enumerate_discrete_optima("cuboid-2").symmetry_classes == 1);
}

TEST_CASE("enumeration is deterministic and respects its budget") {
  const EnumerationResult a = enumerate_discrete_optima("cuboid-4");
  const EnumerationResult b = enumerate_discrete_optima("cuboid-4");
  CHECK(a.count == b.count);
  CHECK(a.nodes == b.nodes);
  CHECK_THROWS_AS(enumerate_discrete_optima("cuboid-4", EnumerationOptions{10}), ModelError);
  CHECK(reference_symmetry_count("cuboid-4") == 44u);
  CHECK_FALSE(reference_symmetry_count("unique"));
}

}  // TEST_SUITE
