#pragma once

// Benchmark problems with known optima, primitive decomposition, the
// cube-and-route comparison setup and warm-start reruns.
//
// Analytical bodies are unions of unit cells. A body's local frame is
// centered on the bounding box of its cells, so a pose with identity
// rotation and translation equal to that center reproduces the cell layout
// in world coordinates.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spi2/boundary.hpp"
#include "spi2/frameworks.hpp"
#include "spi2/solid.hpp"

namespace spi2 {

/// Lattice resolution of the greedy decomposition, nodes per unit length.
inline constexpr int kDecompositionResolution = 48;

using Cell = Eigen::Vector3i;

/// A body made of unit cells; ports are given in the same (cell) coordinates.
struct CellShape {
  std::vector<Cell> cells;
  std::vector<Vec3> ports;

  Box3 bounds() const;
  BoxSolid solid_local() const;  // centered on bounds()
};

enum class PrimitiveKind { Cuboid, LShape, DoubleL, Cube };

struct Primitive {
  PrimitiveKind kind = PrimitiveKind::Cube;
  Vec3 size = Vec3::Ones();  // cuboid extents or cube side in x
};

/// Parses "cuboid:WxHxD", "cube:S", "lshape" or "double_lshape".
Primitive parse_primitive(const std::string& text);

struct Decomposition {
  Body body;
  bool truncated = false;
  double fill_ratio = 0.0;
  std::vector<std::string> warnings;
};

/// Greedy disjoint-ball fill of a solid centered at its bounds center; mass
/// properties from the balls at unit density.
Decomposition decompose_solid(const Solid& solid, std::size_t n_spheres, const std::string& id);
Decomposition decompose_primitive(const Primitive& shape, std::size_t n_spheres);

CellShape cuboid_cells();        // 1x1x2, ports at the centers of both square ends
CellShape lshape_cells();        // 2x2x1 minus one corner cell, ports on the top face
CellShape double_l_cells();      // four-cell base body of the unique benchmark

ProblemSpec gen_cuboid_benchmark(std::size_t n_obj, std::size_t n_spheres = 20);
ProblemSpec gen_lshape_benchmark(std::size_t n_obj, std::size_t n_spheres = 20);
ProblemSpec gen_unique_benchmark(std::size_t n_spheres = 20);
ProblemSpec gen_priorwork_benchmark(std::size_t n_obj, std::size_t n_spheres);

/// Five boxes of mixed size inside a tail-cone-like frustum, connected in a
/// chain, weighted on routing, boundary, CoG and inertia. No known optimum.
ProblemSpec gen_tail_demo(std::size_t n_spheres = 40);

/// Cell layouts of an analytical benchmark: per-body shapes, the route port
/// pairs and the certificate placement (cells already in world position).
struct CellBenchmark {
  std::string id;
  std::vector<CellShape> shapes;
  std::vector<std::pair<PortRef, PortRef>> routes;
  KnownOptimum optimum;
};
CellBenchmark cell_benchmark(const std::string& id);

/// Benchmark ids: cuboid-{2,4,6}, lshape-{2,4,6}, unique, priorwork-{3,4,6},
/// tail-demo.
ProblemSpec make_benchmark(const std::string& id, std::size_t n_spheres = 20);
std::vector<std::string> benchmark_suite(const std::string& suite);

struct BenchmarkResult {
  std::string spec_id;
  std::string framework;
  std::string init;
  std::size_t n_spheres = 0;
  std::uint64_t seed = 0;
  std::vector<RestartRecord> restarts;
  SolveReport best;
  std::size_t best_index = 0;
  double best_volume = 0.0;
  double best_routing_length = 0.0;
  std::optional<KnownOptimum> known_optimum;
  /// Metric minus known optimum; zero without a known optimum.
  double volume_gap = 0.0;
  double routing_gap = 0.0;
  std::map<std::string, std::string> metadata;
};

struct BenchmarkOptions {
  std::string framework = "nested";  // nested | atc | soi
  InitMethod init;
  NestedOptions nested;
  AtcOptions atc;
  SoiOptions soi;
};

/// Restarts of the chosen framework on `spec`, summarized.
BenchmarkResult run_benchmark(const ProblemSpec& spec, const BenchmarkOptions& options,
                              std::size_t n_spheres = 0);

enum class WarmStartSeed { BestInitial, BestSolution };
std::string to_string(WarmStartSeed seed);

/// Regenerates `base.spec_id` at `target_n_spheres` and solves once from the
/// best restart's x0 or x_opt.
BenchmarkResult warm_start_run(const BenchmarkResult& base, std::size_t target_n_spheres,
                               WarmStartSeed seed_choice, const SolverOptions& solver = {});

}  // namespace spi2
