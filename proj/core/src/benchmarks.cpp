#include "spi2/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spi2/objectives.hpp"

namespace spi2 {

Box3 CellShape::bounds() const {
  if (cells.empty()) throw ModelError("cell shape has no cells");
  Box3 box;
  for (const auto& c : cells) {
    const Vec3 lo = c.cast<double>();
    box.extend(lo);
    box.extend(lo + Vec3::Ones());
  }
  return box;
}

BoxSolid CellShape::solid_local() const {
  const Box3 box = bounds();
  const Vec3 center = box.center();
  std::vector<Box3> cuts;
  const Eigen::Vector3i lo = box.min().cast<int>();
  const Eigen::Vector3i hi = box.max().cast<int>();
  for (int z = lo.z(); z < hi.z(); ++z) {
    for (int y = lo.y(); y < hi.y(); ++y) {
      for (int x = lo.x(); x < hi.x(); ++x) {
        const Cell c(x, y, z);
        if (std::find(cells.begin(), cells.end(), c) != cells.end()) continue;
        const Vec3 m = c.cast<double>() - center;
        cuts.emplace_back(m, m + Vec3::Ones());
      }
    }
  }
  return BoxSolid(Box3(box.min() - center, box.max() - center), std::move(cuts));
}

Primitive parse_primitive(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  Primitive p;
  if (name == "lshape") {
    p.kind = PrimitiveKind::LShape;
  } else if (name == "double_lshape") {
    p.kind = PrimitiveKind::DoubleL;
  } else if (name == "cube") {
    p.kind = PrimitiveKind::Cube;
    const double s = args.empty() ? 1.0 : std::stod(args);
    p.size = Vec3::Constant(s);
  } else if (name == "cuboid") {
    p.kind = PrimitiveKind::Cuboid;
    std::istringstream in(args);
    char sep = 0;
    if (!(in >> p.size.x() >> sep >> p.size.y() >> sep >> p.size.z())) {
      throw ModelError("cuboid needs extents as cuboid:WxHxD");
    }
  } else {
    throw ModelError("unknown shape '" + text +
                     "' (expected cuboid:WxHxD, cube:S, lshape or double_lshape)");
  }
  if ((p.size.array() <= 0.0).any()) throw ModelError("shape extents must be positive");
  return p;
}

Decomposition decompose_solid(const Solid& solid, std::size_t n_spheres, const std::string& id) {
  if (n_spheres < 1) throw ModelError("decomposition needs at least one sphere");
  const double spacing = 1.0 / kDecompositionResolution;
  const PackingResult packing = greedy_ball_packing(solid, n_spheres, spacing, spacing);
  Decomposition out;
  out.truncated = packing.truncated;
  out.fill_ratio = packing.fill_ratio;
  if (packing.spheres.empty()) throw ModelError("shape '" + id + "' is too small to hold a sphere");
  if (packing.truncated) {
    out.warnings.push_back("shape '" + id + "' holds only " +
                           std::to_string(packing.spheres.size()) + " of " +
                           std::to_string(n_spheres) + " requested spheres");
  }
  const MassProperties mp = sphere_cloud_mass_properties(packing.spheres);
  out.body.id = id;
  out.body.spheres = packing.spheres;
  out.body.mass = mp.mass;
  out.body.cog_local = mp.cog;
  out.body.inertia_local = mp.inertia;
  return out;
}

CellShape cuboid_cells() {
  return {{Cell(0, 0, 0), Cell(0, 0, 1)}, {Vec3(0.5, 0.5, 2.0), Vec3(0.5, 0.5, 0.0)}};
}

CellShape lshape_cells() {
  return {{Cell(0, 0, 0), Cell(1, 0, 0), Cell(0, 1, 0)},
          {Vec3(0.5, 1.5, 1.0), Vec3(1.5, 0.5, 1.0)}};
}

CellShape double_l_cells() {
  return {{Cell(0, 0, 0), Cell(1, 0, 0), Cell(1, 1, 0), Cell(1, 1, 1)},
          {Vec3(0.5, 0.5, 0.0), Vec3(1.5, 1.5, 0.0), Vec3(1.5, 1.5, 2.0), Vec3(2.0, 1.5, 1.5)}};
}

Decomposition decompose_primitive(const Primitive& shape, std::size_t n_spheres) {
  switch (shape.kind) {
    case PrimitiveKind::Cuboid:
    case PrimitiveKind::Cube: {
      const BoxSolid box(Box3(-0.5 * shape.size, 0.5 * shape.size));
      return decompose_solid(box, n_spheres,
                             shape.kind == PrimitiveKind::Cube ? "cube" : "cuboid");
    }
    case PrimitiveKind::LShape: return decompose_solid(lshape_cells().solid_local(), n_spheres, "lshape");
    case PrimitiveKind::DoubleL:
      return decompose_solid(double_l_cells().solid_local(), n_spheres, "double_lshape");
  }
  throw ModelError("unknown primitive");
}

namespace {

struct Placement {
  std::size_t shape = 0;
  double yaw = 0.0;
  Vec3 center = Vec3::Zero();  // world position of the shape's bounds center
};

Body body_from_cells(const CellShape& shape, std::size_t n_spheres, const std::string& id) {
  Decomposition d = decompose_solid(shape.solid_local(), n_spheres, id);
  const Vec3 center = shape.bounds().center();
  for (const auto& p : shape.ports) d.body.ports.push_back(p - center);
  return std::move(d.body);
}

// Shifts certificate translations by a multiple of one half so the layout
// sits near the origin while staying exactly representable.
Vec3 centering_shift(const std::vector<Placement>& placements) {
  Vec3 mean = Vec3::Zero();
  for (const auto& p : placements) mean += p.center;
  mean /= static_cast<double>(placements.size());
  return (2.0 * mean).array().round().matrix() / 2.0;
}

ProblemSpec assemble_analytical(const std::string& id, const std::vector<CellShape>& shapes,
                                const std::vector<std::string>& names,
                                const std::vector<Placement>& placements,
                                const std::vector<std::pair<PortRef, PortRef>>& routes,
                                KnownOptimum optimum, std::size_t n_spheres, double half_width) {
  ProblemSpec spec;
  spec.id = id;
  std::vector<Body> prototypes;
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    prototypes.push_back(body_from_cells(shapes[s], n_spheres, names[s]));
  }
  std::vector<Pose> poses;
  const Vec3 shift = centering_shift(placements);
  for (std::size_t i = 0; i < placements.size(); ++i) {
    Body b = prototypes[placements[i].shape];
    b.id = names[placements[i].shape] + "-" + std::to_string(i + 1);
    spec.bodies.push_back(std::move(b));
    poses.push_back(Pose{placements[i].yaw, 0.0, 0.0, placements[i].center - shift});
  }
  for (std::size_t r = 0; r < routes.size(); ++r) {
    Route route;
    route.id = "route-" + std::to_string(r + 1);
    route.from = routes[r].first;
    route.to = routes[r].second;
    spec.routes.push_back(route);
  }
  spec.weights = objective_preset("f1");
  spec.bounds.lower = Vec3::Constant(-half_width);
  spec.bounds.upper = Vec3::Constant(half_width);
  spec.known_optimum = optimum;
  const DesignLayout layout = spec.layout();
  spec.certificate = pack(layout, poses, std::vector<std::vector<Vec3>>(routes.size()));
  spec.validate();
  return spec;
}

void check_count(std::size_t n, std::initializer_list<std::size_t> allowed, const char* what) {
  if (std::find(allowed.begin(), allowed.end(), n) == allowed.end()) {
    std::ostringstream msg;
    msg << what << " benchmark does not support " << n << " objects";
    throw ModelError(msg.str());
  }
}

// Consecutive grid positions of the cuboid ring; neighbors are unit apart.
std::vector<Vec3> cuboid_ring(std::size_t n) {
  if (n == 2) return {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  if (n == 4) return {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
  return {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(2, 1, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
}

struct AnalyticalLayout {
  std::vector<CellShape> shapes;
  std::vector<std::string> names;
  std::vector<Placement> placements;
  std::vector<std::pair<PortRef, PortRef>> routes;
  KnownOptimum optimum;
  double half_width = 3.0;
};

AnalyticalLayout cuboid_layout(std::size_t n) {
  check_count(n, {2, 4, 6}, "cuboid");
  AnalyticalLayout a;
  a.shapes = {cuboid_cells()};
  a.names = {"cuboid"};
  for (const Vec3& p : cuboid_ring(n)) a.placements.push_back({0, 0.0, p});
  // Ring: body k to k+1, alternating top (port 0) and bottom (port 1) ends.
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t port = k % 2;
    a.routes.push_back({PortRef{k, port}, PortRef{(k + 1) % n, port}});
  }
  a.optimum = {2.0 * static_cast<double>(n), static_cast<double>(n)};
  a.half_width = n == 2 ? 3.0 : (n == 4 ? 4.0 : 5.0);
  return a;
}

AnalyticalLayout lshape_layout(std::size_t n) {
  check_count(n, {2, 4, 6}, "lshape");
  AnalyticalLayout a;
  a.shapes = {lshape_cells()};
  a.names = {"lshape"};
  // Interlocking pairs: the second L is turned half a revolution about z and
  // fills the missing corner; pairs sit side by side along x.
  for (std::size_t p = 0; p < n / 2; ++p) {
    const double x = 1.0 + 2.0 * static_cast<double>(p);
    a.placements.push_back({0, 0.0, Vec3(x, 1.0, 0.5)});
    a.placements.push_back({0, std::numbers::pi, Vec3(x, 2.0, 0.5)});
    const std::size_t i = 2 * p, j = 2 * p + 1;
    a.routes.push_back({PortRef{i, 0}, PortRef{j, 1}});
    a.routes.push_back({PortRef{i, 1}, PortRef{j, 0}});
  }
  a.optimum = {3.0 * static_cast<double>(n), static_cast<double>(n)};
  a.half_width = n == 2 ? 3.0 : (n == 4 ? 4.0 : 5.0);
  return a;
}

AnalyticalLayout unique_layout() {
  AnalyticalLayout a;
  const CellShape l1{{Cell(0, 1, 0), Cell(0, 2, 0), Cell(1, 2, 0)},
                     {Vec3(0.5, 1.5, 0.0), Vec3(1.5, 2.5, 0.0)}};
  const CellShape l2{{Cell(0, 1, 1), Cell(0, 2, 1), Cell(1, 2, 1)},
                     {Vec3(0.5, 1.5, 2.0), Vec3(1.5, 2.5, 2.0)}};
  const CellShape c{{Cell(0, 0, 1), Cell(1, 0, 1)}, {Vec3(0.5, 0.5, 2.0), Vec3(2.0, 0.5, 1.5)}};
  a.shapes = {double_l_cells(), l1, l2, c};
  a.names = {"double_lshape", "lshape_lower", "lshape_upper", "cuboid"};
  for (std::size_t s = 0; s < a.shapes.size(); ++s) {
    a.placements.push_back({s, 0.0, a.shapes[s].bounds().center()});
  }
  a.routes = {{PortRef{0, 0}, PortRef{1, 0}},   // underside
              {PortRef{0, 1}, PortRef{1, 1}},   // underside
              {PortRef{3, 0}, PortRef{2, 0}},
              {PortRef{0, 2}, PortRef{2, 1}},
              {PortRef{3, 1}, PortRef{0, 3}}};  // side face
  a.optimum = {12.0, 5.0};
  a.half_width = 3.0;
  return a;
}

ProblemSpec build(const std::string& id, const AnalyticalLayout& a, std::size_t n_spheres) {
  return assemble_analytical(id, a.shapes, a.names, a.placements, a.routes, a.optimum, n_spheres,
                             a.half_width);
}

std::pair<std::string, std::size_t> split_id(const std::string& id) {
  const auto dash = id.rfind('-');
  if (dash == std::string::npos) return {id, 0};
  try {
    return {id.substr(0, dash), static_cast<std::size_t>(std::stoul(id.substr(dash + 1)))};
  } catch (const std::exception&) {
    throw ModelError("malformed benchmark id '" + id + "'");
  }
}

}  // namespace

ProblemSpec gen_cuboid_benchmark(std::size_t n_obj, std::size_t n_spheres) {
  return build("cuboid-" + std::to_string(n_obj), cuboid_layout(n_obj), n_spheres);
}

ProblemSpec gen_lshape_benchmark(std::size_t n_obj, std::size_t n_spheres) {
  return build("lshape-" + std::to_string(n_obj), lshape_layout(n_obj), n_spheres);
}

ProblemSpec gen_unique_benchmark(std::size_t n_spheres) {
  return build("unique", unique_layout(), n_spheres);
}

ProblemSpec gen_priorwork_benchmark(std::size_t n_obj, std::size_t n_spheres) {
  check_count(n_obj, {3, 4, 6}, "priorwork");
  check_count(n_spheres, {14, 25, 50, 100}, "priorwork sphere count");
  const BoxSolid cube(Box3(Vec3::Constant(-0.75), Vec3::Constant(0.75)));
  Decomposition d = decompose_solid(cube, n_spheres, "cube");
  d.body.ports.push_back(Vec3::Zero());
  ProblemSpec spec;
  spec.id = "priorwork-" + std::to_string(n_obj);
  for (std::size_t i = 0; i < n_obj; ++i) {
    Body b = d.body;
    b.id = "cube-" + std::to_string(i + 1);
    spec.bodies.push_back(std::move(b));
  }
  // Three routes for three cubes; a closed ring otherwise.
  for (std::size_t k = 0; k < n_obj; ++k) {
    Route r;
    r.id = "route-" + std::to_string(k + 1);
    r.from = PortRef{k, 0};
    r.to = PortRef{(k + 1) % n_obj, 0};
    r.n_control_points = 2;
    spec.routes.push_back(r);
  }
  spec.weights = objective_preset("f1");
  spec.route_exemption = RouteExemption::HostBody;
  spec.validate();
  return spec;
}

ProblemSpec gen_tail_demo(std::size_t n_spheres) {
  if (n_spheres < 1) throw ModelError("tail demo needs at least one sphere per body");
  const FrustumSolid cone(1.5, 0.8, 6.0);
  ProblemSpec spec;
  spec.id = "tail-demo";
  const std::vector<Vec3> sizes{{1.0, 0.8, 0.6}, {0.8, 0.8, 0.8}, {1.2, 0.5, 0.5},
                                {0.6, 0.6, 0.9}, {0.7, 0.5, 0.4}};
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    Decomposition d = decompose_solid(BoxSolid(Box3(-0.5 * sizes[i], 0.5 * sizes[i])), n_spheres,
                                      "unit-" + std::to_string(i + 1));
    d.body.ports = {Vec3(0.5 * sizes[i].x(), 0.0, 0.0), Vec3(-0.5 * sizes[i].x(), 0.0, 0.0)};
    spec.bodies.push_back(std::move(d.body));
  }
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    Route r;
    r.id = "line-" + std::to_string(k + 1);
    r.from = PortRef{k, 0};
    r.to = PortRef{k + 1, 1};
    r.n_control_points = 1;
    spec.routes.push_back(r);
  }
  spec.boundary = build_boundary(cone).model;
  spec.weights.routing = 1.0;
  spec.weights.boundary = 1.0;
  spec.weights.cog = 1.0;
  spec.weights.inertia = 1.0;
  const Box3 box = cone.bounds();
  spec.bounds.lower = box.min();
  spec.bounds.upper = box.max();
  spec.bounds.angle_limit = std::numbers::pi;
  spec.cog_target = Vec3(0.0, 0.0, 2.0);
  spec.validate();
  return spec;
}

CellBenchmark cell_benchmark(const std::string& id) {
  const auto [kind, n] = split_id(id);
  AnalyticalLayout a;
  if (kind == "cuboid") {
    a = cuboid_layout(n);
  } else if (kind == "lshape") {
    a = lshape_layout(n);
  } else if (id == "unique") {
    a = unique_layout();
  } else {
    throw ModelError("no cell model for benchmark '" + id + "'");
  }
  CellBenchmark out;
  out.id = id;
  for (const auto& p : a.placements) out.shapes.push_back(a.shapes[p.shape]);
  out.routes = a.routes;
  out.optimum = a.optimum;
  return out;
}

ProblemSpec make_benchmark(const std::string& id, std::size_t n_spheres) {
  if (id == "unique") return gen_unique_benchmark(n_spheres);
  if (id == "tail-demo") return gen_tail_demo(n_spheres);
  const auto [kind, n] = split_id(id);
  if (kind == "cuboid") return gen_cuboid_benchmark(n, n_spheres);
  if (kind == "lshape") return gen_lshape_benchmark(n, n_spheres);
  if (kind == "priorwork") return gen_priorwork_benchmark(n, n_spheres);
  throw ModelError("unknown benchmark '" + id +
                   "' (expected cuboid-N, lshape-N, unique, priorwork-N or tail-demo)");
}

std::vector<std::string> benchmark_suite(const std::string& suite) {
  if (suite == "cuboid") return {"cuboid-2", "cuboid-4", "cuboid-6"};
  if (suite == "lshape") return {"lshape-2", "lshape-4", "lshape-6"};
  if (suite == "unique") return {"unique"};
  if (suite == "tail-demo") return {"tail-demo"};
  if (suite == "priorwork") return {"priorwork-3", "priorwork-4", "priorwork-6"};
  if (suite == "analytical") {
    return {"cuboid-2", "cuboid-4", "cuboid-6", "lshape-2", "lshape-4", "lshape-6", "unique"};
  }
  // A single benchmark id is a suite of one.
  make_benchmark(suite, 1);
  return {suite};
}

BenchmarkResult run_benchmark(const ProblemSpec& spec, const BenchmarkOptions& options,
                              std::size_t n_spheres) {
  NestedOptions nested = options.nested;
  if (options.framework == "atc") {
    const AtcOptions atc = options.atc;
    nested.local = [atc](const ProblemSpec& s, const VecX& x0) {
      return atc_solve(s, x0, atc).report;
    };
  } else if (options.framework == "soi") {
    const SoiOptions soi = options.soi;
    nested.local = [soi](const ProblemSpec& s, const VecX& x0) {
      return soi_solve(s, x0, soi).report;
    };
  } else if (options.framework != "nested") {
    throw ModelError("unknown framework '" + options.framework + "' (expected nested, atc or soi)");
  }
  NestedResult nr = nested_solve(spec, options.init, nested);

  BenchmarkResult out;
  out.spec_id = spec.id;
  out.framework = options.framework;
  out.init = to_string(options.init.kind);
  out.n_spheres = n_spheres;
  out.seed = options.init.seed;
  out.best_index = nr.best_index;
  out.best = std::move(nr.best);
  out.restarts = std::move(nr.restarts);
  out.best_volume = exact_aabb_volume(out.best.x_opt, spec);
  out.best_routing_length = routing_length_linear(out.best.x_opt, spec);
  out.known_optimum = spec.known_optimum;
  if (spec.known_optimum) {
    out.volume_gap = out.best_volume - spec.known_optimum->volume;
    out.routing_gap = out.best_routing_length - spec.known_optimum->routing_length;
  }
  return out;
}

std::string to_string(WarmStartSeed seed) {
  return seed == WarmStartSeed::BestInitial ? "x0_best" : "x_opt_best";
}

BenchmarkResult warm_start_run(const BenchmarkResult& base, std::size_t target_n_spheres,
                               WarmStartSeed seed_choice, const SolverOptions& solver) {
  if (base.restarts.empty() || base.best_index >= base.restarts.size()) {
    throw ModelError("warm start needs a base result with restart records");
  }
  const RestartRecord& rec = base.restarts[base.best_index];
  const ProblemSpec spec = make_benchmark(base.spec_id, target_n_spheres);
  BenchmarkOptions opt;
  opt.init.kind = InitKind::Manual;
  opt.init.seed = base.seed;
  opt.init.manual = seed_choice == WarmStartSeed::BestInitial ? rec.x0 : rec.x_opt;
  opt.nested.restarts = 1;
  opt.nested.solver = solver;
  BenchmarkResult out = run_benchmark(spec, opt, target_n_spheres);
  out.metadata["warm_start_seed"] = to_string(seed_choice);
  out.metadata["warm_start_base_spheres"] = std::to_string(base.n_spheres);
  out.metadata["warm_start_base_restart"] = std::to_string(base.best_index);
  return out;
}

}  // namespace spi2
