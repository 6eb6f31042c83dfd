#pragma once

// Exhaustive count of grid-aligned layouts that reach an analytical
// benchmark's optimum volume and routing length.
//
// Layouts use integer translations and the 24 axis-aligned rotations inside
// every integer box whose volume equals the optimum. Two layouts are the same
// when every body occupies the same cells with the same port positions;
// rotations or reflections of the whole assembly are counted separately.
// Routes are straight port-to-port segments and may not cross a cell
// interior.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spi2/benchmarks.hpp"

namespace spi2 {

struct EnumerationOptions {
  std::uint64_t node_budget = 200'000'000;
};

struct EnumerationResult {
  std::string id;
  std::size_t count = 0;
  /// Layouts identified under the 48 axis-aligned rotations and reflections
  /// of the whole assembly and swaps of equal bodies.
  std::size_t symmetry_classes = 0;
  std::optional<std::size_t> reference_count;
  std::size_t boxes = 0;
  std::uint64_t nodes = 0;
  bool matches_reference() const { return reference_count && *reference_count == count; }
};

/// Reference counts for cuboid-{2,4,6} and lshape-{2,4,6}.
std::optional<std::size_t> reference_symmetry_count(const std::string& id);

/// The 24 proper rotations with integer entries; with `reflections` also the
/// 24 improper ones.
std::vector<Eigen::Matrix3i> axis_rotations(bool reflections = false);

/// Throws ModelError when the node budget is exhausted.
EnumerationResult enumerate_discrete_optima(const std::string& benchmark,
                                            const EnumerationOptions& options = {});

}  // namespace spi2
