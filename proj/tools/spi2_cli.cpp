// spi2: solve scenes, run benchmark suites, check result files, decompose
// primitives and count discrete optima.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "spi2/benchmarks.hpp"
#include "spi2/boundary.hpp"
#include "spi2/enumerate.hpp"
#include "spi2/scene_io.hpp"

namespace fs = std::filesystem;
using namespace spi2;

namespace {

struct RunFlags {
  std::string framework;
  std::string init;
  std::optional<std::size_t> restarts;
  std::optional<std::string> preset;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 0;
  std::string out;
  bool timings = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--framework", f.framework, "nested, atc or soi")
      ->check(CLI::IsMember({"nested", "atc", "soi"}));
  cmd->add_option("--init", f.init, "random, es, ga or manual")
      ->check(CLI::IsMember({"random", "es", "ga", "manual"}));
  cmd->add_option("--restarts", f.restarts, "number of restarts")->check(CLI::PositiveNumber);
  cmd->add_option("--preset", f.preset, "objective preset")
      ->check(CLI::IsMember({"f1", "f2", "f3", "f4"}));
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--jobs", f.jobs, "worker threads (default: SPI2_JOBS or all cores)");
  cmd->add_option("--out", f.out, "result file (solve) or directory (bench)");
  cmd->add_flag("--timings", f.timings, "include wall times in result files");
}

BenchmarkOptions make_options(const RunFlags& f, const SceneSettings& s) {
  BenchmarkOptions o;
  o.framework = !f.framework.empty() ? f.framework : s.framework.value_or("nested");
  o.init.kind = parse_init_kind(!f.init.empty() ? f.init : s.init.value_or("random"));
  o.init.seed = f.seed ? *f.seed : s.seed.value_or(1);
  o.init.manual = s.x0;
  o.nested.restarts = f.restarts ? *f.restarts : s.restarts.value_or(1);
  o.nested.jobs = f.jobs;
  o.nested.solver = s.solver;
  o.atc.solver = s.solver;
  o.soi.solver = s.solver;
  return o;
}

void print_summary(const BenchmarkResult& r) {
  std::printf("%-14s %-6s %-6s restarts=%zu best=%zu f=%.10g viol=%.3g volume=%.10g routing=%.10g %s\n",
              r.spec_id.c_str(), r.framework.c_str(), r.init.c_str(), r.restarts.size(),
              r.best_index, r.best.f_opt, r.best.max_violation, r.best_volume,
              r.best_routing_length, r.best.termination.c_str());
  if (r.known_optimum) {
    std::printf("%-14s optimum volume=%g routing=%g gap volume=%.3g routing=%.3g\n", "",
                r.known_optimum->volume, r.known_optimum->routing_length, r.volume_gap,
                r.routing_gap);
  }
}

bool success(const SolveReport& r, double tol_feas) { return r.converged && r.feasible(tol_feas); }

int cmd_solve(const std::string& input, const RunFlags& f, std::size_t spheres) {
  SceneFile scene;
  if (fs::exists(input)) {
    scene = load_scene_file(input);
  } else if (fs::path(input).has_extension() || input.find('/') != std::string::npos) {
    throw ModelError("cannot open scene file '" + input + "'");
  } else {
    scene.spec = make_benchmark(input, spheres);
  }
  if (f.preset) scene.settings.preset = f.preset;
  if (scene.settings.preset) {
    const ObjectiveWeights base = scene.spec.weights;
    scene.spec.weights = objective_preset(*scene.settings.preset);
    scene.spec.weights.boundary = base.boundary;
  }
  BenchmarkOptions opt = make_options(f, scene.settings);
  if (opt.init.kind == InitKind::Manual && !opt.init.manual) {
    if (!scene.spec.certificate) throw ModelError("manual init needs settings.x0 or a certificate");
    opt.init.manual = scene.spec.certificate;
  }
  const BenchmarkResult r = run_benchmark(scene.spec, opt, fs::exists(input) ? 0 : spheres);
  print_summary(r);
  if (!f.out.empty()) save_result(f.out, scene.spec, r, ResultOptions{f.timings});
  return success(r.best, opt.nested.solver.tol_feas) ? 0 : 1;
}

int cmd_bench(const std::string& suite, const RunFlags& f, std::size_t spheres) {
  SceneSettings none;
  BenchmarkOptions opt = make_options(f, none);
  if (f.out.size()) fs::create_directories(f.out);
  bool ok = true;
  for (const auto& id : benchmark_suite(suite)) {
    std::size_t n = spheres;
    if (id.rfind("priorwork", 0) == 0 && n == 20) n = 25;
    ProblemSpec spec = make_benchmark(id, n);
    if (f.preset) spec.weights = objective_preset(*f.preset);
    if (opt.init.kind == InitKind::Manual) opt.init.manual = spec.certificate;
    const BenchmarkResult r = run_benchmark(spec, opt, n);
    print_summary(r);
    if (!f.out.empty()) {
      save_result(fs::path(f.out) / (id + ".json"), spec, r, ResultOptions{f.timings});
    }
    ok = ok && success(r.best, opt.nested.solver.tol_feas);
  }
  return ok ? 0 : 1;
}

int cmd_validate(const std::string& path, double tol_feas) {
  const LoadedResult loaded = load_result(path);
  const ReplayCheck c = replay(loaded);
  std::printf("objective  recorded=%.17g replayed=%.17g\n", c.f_recorded, c.f_replayed);
  std::printf("violation  recorded=%.17g replayed=%.17g\n", c.violation_recorded,
              c.violation_replayed);
  if (loaded.spec.boundary) {
    const InclusionResult inc = hard_inclusion_check(loaded.x, loaded.spec, *loaded.spec.boundary);
    std::printf("inclusion  inside=%zu/%zu phi_max=%.6g rho_min=%.6g\n", inc.spheres_inside,
                inc.spheres_total, inc.phi_max, inc.rho_min);
  }
  const bool feasible = c.violation_replayed <= tol_feas;
  std::printf("%s %s\n", c.identical() ? "replay identical," : "replay MISMATCH,",
              feasible ? "feasible" : "infeasible");
  return c.identical() && feasible ? 0 : 1;
}

int cmd_decompose(const std::string& shape, std::size_t n, const std::string& out) {
  const Decomposition d = decompose_primitive(parse_primitive(shape), n);
  for (const auto& w : d.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("spheres=%zu fill_ratio=%.6f mass=%.10g\n", d.body.spheres.size(), d.fill_ratio,
              d.body.mass);
  for (const auto& s : d.body.spheres) {
    std::printf("  %.10g %.10g %.10g  r=%.10g\n", s.center.x(), s.center.y(), s.center.z(),
                s.radius);
  }
  if (!out.empty()) {
    ProblemSpec spec;
    spec.id = shape;
    spec.bodies.push_back(d.body);
    save_scene(out, spec);
  }
  return 0;
}

int cmd_enumerate(const std::string& id, std::uint64_t budget) {
  const EnumerationResult r = enumerate_discrete_optima(id, EnumerationOptions{budget});
  std::printf("%s: %zu optimal layouts, %zu up to symmetry (%zu boxes, %llu nodes)", r.id.c_str(),
              r.count, r.symmetry_classes, r.boxes, static_cast<unsigned long long>(r.nodes));
  if (r.reference_count) {
    std::printf(", reference count %zu%s", *r.reference_count,
                r.matches_reference() ? "" : " (differs)");
  }
  std::printf("\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packaging and routing optimizer for sphere-decomposed bodies"};
  app.require_subcommand(1);
  double tol_feas = 1e-6;

  RunFlags solve_flags;
  std::string scene;
  std::size_t solve_spheres = 20;
  auto* solve = app.add_subcommand("solve", "Solve a scene file or a benchmark id");
  solve->add_option("scene", scene, "scene file or benchmark id")->required();
  solve->add_option("--spheres", solve_spheres, "spheres per body for benchmark ids");
  add_run_flags(solve, solve_flags);

  RunFlags bench_flags;
  std::string suite;
  std::size_t bench_spheres = 20;
  auto* bench = app.add_subcommand("bench", "Run a benchmark suite or a single benchmark");
  bench->add_option("suite", suite, "cuboid, lshape, unique, priorwork, analytical, tail-demo or an id")
      ->required();
  bench->add_option("--spheres", bench_spheres, "spheres per body");
  add_run_flags(bench, bench_flags);

  std::string result_path;
  auto* validate = app.add_subcommand("validate", "Re-evaluate a result file");
  validate->add_option("result", result_path, "result file")->required()->check(CLI::ExistingFile);
  validate->add_option("--tol", tol_feas, "feasibility tolerance");

  std::string shape, decompose_out;
  std::size_t n_spheres = 0;
  auto* decompose = app.add_subcommand("decompose", "Greedy sphere decomposition of a primitive");
  decompose->add_option("shape", shape, "cuboid:WxHxD, cube:S, lshape or double_lshape")->required();
  decompose->add_option("n", n_spheres, "number of spheres")->required()->check(CLI::PositiveNumber);
  decompose->add_option("--out", decompose_out, "write the body as a scene");

  std::string enum_id;
  std::uint64_t budget = EnumerationOptions{}.node_budget;
  auto* enumerate = app.add_subcommand("enumerate", "Count grid layouts reaching the optimum");
  enumerate->add_option("benchmark", enum_id, "cuboid-N, lshape-N or unique")->required();
  enumerate->add_option("--budget", budget, "search node budget");

  std::string gen_id, gen_out;
  std::size_t gen_spheres = 20;
  auto* generate = app.add_subcommand("generate", "Write a benchmark as a scene file");
  generate->add_option("benchmark", gen_id, "benchmark id")->required();
  generate->add_option("--spheres", gen_spheres, "spheres per body");
  generate->add_option("--out", gen_out, "scene file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(scene, solve_flags, solve_spheres);
    if (*bench) return cmd_bench(suite, bench_flags, bench_spheres);
    if (*validate) return cmd_validate(result_path, tol_feas);
    if (*decompose) return cmd_decompose(shape, n_spheres, decompose_out);
    if (*enumerate) return cmd_enumerate(enum_id, budget);
    if (*generate) {
      save_scene(gen_out, make_benchmark(gen_id, gen_spheres));
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
