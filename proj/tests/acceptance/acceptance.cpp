// Acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spi2/benchmarks.hpp"
#include "spi2/boundary.hpp"
#include "spi2/constraints.hpp"
#include "spi2/frameworks.hpp"
#include "spi2/objectives.hpp"
#include "spi2/physics.hpp"
#include "spi2/scene_io.hpp"
#include "spi2/smooth.hpp"

using namespace spi2;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  if (!pass) ++failures;
  std::printf("%s  %2d  %-34s %s  (%.1fs)\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

// Benchmark protocol shared by criteria 1, 2, 4 and 12.
BenchmarkResult run_random(const std::string& id, std::size_t restarts, std::uint64_t seed) {
  const ProblemSpec spec = make_benchmark(id, 20);
  BenchmarkOptions opt;
  opt.init.kind = InitKind::Random;
  opt.init.seed = seed;
  opt.nested.restarts = restarts;
  opt.nested.jobs = 1;
  return run_benchmark(spec, opt, 20);
}

std::string cuboid_result_text;

void criterion_1() {
  Timer t;
  const BenchmarkResult r = run_random("cuboid-2", 50, 1);
  cuboid_result_text = result_to_string(make_benchmark("cuboid-2", 20), r);
  const double v = r.best.max_violation;
  const bool pass = r.best_volume <= 4.04 && r.best_routing_length <= 2.04 && v <= 1e-6;
  report(1, "cuboid n=2 optimum recovery", pass,
         fmt("volume %.6f <= 4.04, routing %.6f <= 2.04, violation %.2e <= 1e-6", r.best_volume,
             r.best_routing_length, v),
         t.seconds());
}

void criterion_2() {
  Timer t;
  const BenchmarkResult r = run_random("lshape-2", 50, 1);
  const double v = r.best.max_violation;
  const bool pass = r.best_volume <= 6.12 && r.best_routing_length <= 2.1 && v <= 1e-6;
  report(2, "L-shape n=2 optimum recovery", pass,
         fmt("volume %.6f <= 6.12, routing %.6f <= 2.1, violation %.2e <= 1e-6", r.best_volume,
             r.best_routing_length, v),
         t.seconds());
}

void criterion_3() {
  Timer t;
  double worst_v = 0.0, worst_r = 0.0, worst_g = 0.0;
  for (const auto& id : {"cuboid-2", "cuboid-4", "cuboid-6", "lshape-2", "lshape-4", "lshape-6",
                         "unique"}) {
    const ProblemSpec spec = make_benchmark(id, 20);
    const VecX& x = *spec.certificate;
    worst_v = std::max(worst_v, std::abs(exact_aabb_volume(x, spec) - spec.known_optimum->volume));
    worst_r = std::max(worst_r, std::abs(routing_length_linear(x, spec) -
                                         spec.known_optimum->routing_length));
    worst_g = std::max(worst_g, full_constraint_violation(spec, x));
  }
  const bool pass = worst_v <= 1e-9 && worst_r <= 1e-9 && worst_g <= 1e-6;
  report(3, "certificate feasibility", pass,
         fmt("max |dV| %.1e, max |dL| %.1e <= 1e-9, violation %.1e <= 1e-6", worst_v, worst_r,
             worst_g),
         t.seconds());
}

void criterion_4() {
  Timer t;
  const ProblemSpec spec = make_benchmark("unique", 20);
  const VecX& cert = *spec.certificate;
  InitMethod init;
  init.kind = InitKind::Manual;
  init.manual = cert;
  NestedOptions one;
  one.restarts = 1;
  const NestedResult fixed = nested_solve(spec, init, one);
  const double f_cert = total_objective(cert, spec).total;
  const double moved = (fixed.best.x_opt - cert).cwiseAbs().maxCoeff();
  // Fixed point: the solve from the certificate stays feasible and finds no
  // lower objective than the certificate beyond 1e-6.
  const bool fixed_ok =
      fixed.best.max_violation <= 1e-6 && std::abs(fixed.best.f_opt - f_cert) <= 1e-6;

  const BenchmarkResult r = run_random("unique", 200, 1);
  const bool volume_ok = r.best_volume <= 13.2 && r.best.max_violation <= 1e-6;
  report(4, "unique benchmark", fixed_ok,
         fmt("fixed point |df| %.2e <= 1e-6 (max |dx| %.1e, violation %.1e); 200 restarts "
             "volume %.4f (<= 13.2: %s)",
             std::abs(fixed.best.f_opt - f_cert), moved, fixed.best.max_violation, r.best_volume,
             volume_ok ? "yes" : "no"),
         t.seconds());
}

void criterion_5() {
  Timer t;
  const std::vector<std::size_t> uniform(3, 100);
  bool pass = pair_count(uniform) == 30000;
  oracle::Rng rng(505);
  for (int k = 0; k < 1000 && pass; ++k) {
    std::vector<std::size_t> counts(1 + rng.index(8));
    for (auto& c : counts) c = rng.index(60);
    std::size_t brute = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
      for (std::size_t j = i + 1; j < counts.size(); ++j)
        for (std::size_t a = 0; a < counts[i]; ++a)
          for (std::size_t b = 0; b < counts[j]; ++b) ++brute;
    pass = pair_count(counts) == brute;
  }
  const ProblemSpec spec = oracle::random_spec(rng, 4, 6, 0, 0);
  std::vector<std::size_t> sizes;
  for (const auto& b : spec.bodies) sizes.push_back(b.spheres.size());
  const ConstraintSet cs(spec, ConstraintMode{});
  pass = pass && cs.term_count(ConstraintKind::ObjObj) == pair_count(sizes);
  report(5, "constraint-count formula", pass, "(3,100) -> 30000; 1000 heterogeneous cases exact",
         t.seconds());
}

void criterion_6() {
  Timer t;
  oracle::Rng rng(606);
  ProblemSpec spec = oracle::random_spec(rng, 3, 4, 3, 2);
  spec.boundary = unit_cube_boundary(BoundaryBuildOptions{8, 100, 200, 1.0, 5}).model;
  const Vec3 target(0.2, -0.1, 0.3);
  const Vec3 axes(1.0, 0.5, 2.0);

  using Fn = std::function<double(const VecX&, VecX*)>;
  std::vector<std::pair<std::string, Fn>> terms = {
      {"routing-quadratic", [&](const VecX& x, VecX* g) { return routing_length_sq(x, spec, g); }},
      {"routing-exponential",
       [&](const VecX& x, VecX* g) { return routing_exponential(x, spec, 0.2, g); }},
      {"volume", [&](const VecX& x, VecX* g) { return smooth_aabb_volume(x, spec, 50.0, g); }},
      {"boundary",
       [&](const VecX& x, VecX* g) { return boundary_objective(x, spec, *spec.boundary, g); }},
      {"cog", [&](const VecX& x, VecX* g) { return f_cog(x, spec, target, g); }},
      {"inertia", [&](const VecX& x, VecX* g) { return f_inertia(x, spec, axes, g); }},
      {"mean-distance",
       [&](const VecX& x, VecX* g) { return mean_pairwise_distance(x, spec, g); }},
  };

  // Constraint rows of each kind, in both constraint modes; the active-pair
  // set leaves the other pairs on enclosing rows.
  const PairSet active{{0, 1}};
  std::vector<std::pair<std::string, ConstraintSet>> sets;
  sets.emplace_back("absolute", ConstraintSet(spec, ConstraintMode{}, active));
  ConstraintMode soft;
  soft.kind = ConstraintModeKind::SoftSum;
  sets.emplace_back("soft-sum", ConstraintSet(spec, soft, active));
  for (const auto& [mode, cs] : sets) {
    for (auto kind : {ConstraintKind::ObjObj, ConstraintKind::RouteObj, ConstraintKind::RouteRoute,
                      ConstraintKind::Enclosing}) {
      VecX w = VecX::Zero(static_cast<Eigen::Index>(cs.size()));
      for (std::size_t r = 0; r < cs.size(); ++r) {
        if (cs.labels()[r].kind == kind) w[static_cast<Eigen::Index>(r)] = rng.uniform(0.5, 1.5);
      }
      if (w.isZero()) continue;
      const ConstraintSet* set = &cs;
      terms.emplace_back(mode + "/" + to_string(kind), [set, w](const VecX& x, VecX* g) {
        if (g) set->accumulate_gradient(x, w, *g);
        return w.dot(set->evaluate(x));
      });
    }
  }

  double worst = 0.0;
  std::string worst_name;
  for (int k = 0; k < 20; ++k) {
    const VecX x = oracle::random_x(rng, spec, 1.5);
    for (const auto& [name, fn] : terms) {
      VecX g = VecX::Zero(x.size());
      fn(x, &g);
      const double err = check_gradient([&](const VecX& v) { return fn(v, nullptr); }, g, x, 1e-6);
      if (err > worst) {
        worst = err;
        worst_name = name;
      }
    }
  }
  report(6, "gradient suite", worst <= 1e-5,
         fmt("%zu terms x 20 points, worst rel err %.2e (%s) <= 1e-5", terms.size(), worst,
             worst_name.c_str()),
         t.seconds());
}

void criterion_7() {
  Timer t;
  oracle::Rng rng(707);
  bool pass = true;
  double slack = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const std::size_t n = 1 + rng.index(20);
    const double alpha = rng.uniform(0.5, 200.0);
    std::vector<double> v(n);
    for (auto& e : v) e = rng.uniform(-10, 10);
    const double mx = *std::max_element(v.begin(), v.end());
    const double mn = *std::min_element(v.begin(), v.end());
    const double lg = std::log(static_cast<double>(n)) / alpha;
    const double sp = soft_max(v, alpha), sm = soft_min(v, alpha);
    const double bx = boltzmann_max(v, alpha), bn = boltzmann_min(v, alpha);
    pass = pass && mx <= sp + 1e-12 && sp <= mx + lg + 1e-12;
    pass = pass && mn - lg - 1e-12 <= sm && sm <= mn + 1e-12;
    pass = pass && bx <= mx + 1e-12 && bn >= mn - 1e-12;
    slack = std::max({slack, sp - mx - lg, mx - sp, bx - mx, mn - bn});
  }
  report(7, "soft-operator bounds", pass,
         fmt("10000 vectors, worst excess %.1e <= 1e-12", std::max(slack, 0.0)), t.seconds());
}

void criterion_8() {
  Timer t;
  oracle::Rng rng(808);
  double worst_eq = 0.0, worst_tr = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ProblemSpec spec = oracle::random_spec(rng, 2 + rng.index(4), 4, 0, 0);
    const VecX x = oracle::random_x(rng, spec);
    const Mat3 q = oracle::rotation(rng.uniform(-3, 3), rng.uniform(-1.5, 1.5), rng.uniform(-3, 3));
    VecX xq = x;
    for (std::size_t i = 0; i < spec.bodies.size(); ++i) {
      const auto o = static_cast<Eigen::Index>(6 * i);
      const Mat3 r = q * oracle::rotation(x[o], x[o + 1], x[o + 2]);
      xq.segment<3>(o) = r.eulerAngles(2, 1, 0);
      xq.segment<3>(o + 3) = q * x.segment<3>(o + 3);
    }
    const Mat3 a = inertia_about_global_cog(x, spec), b = inertia_about_global_cog(xq, spec);
    worst_eq = std::max(worst_eq, (b - q * a * q.transpose()).cwiseAbs().maxCoeff());
    worst_tr = std::max(worst_tr, std::abs(a.trace() - b.trace()));
  }

  // Point masses 2 and 3 at x = -1.5 and x = 1: CoG at the origin.
  ProblemSpec pm;
  Body body;
  body.id = "p";
  body.spheres = {{Vec3::Zero(), 0.01}};
  body.mass = 2.0;
  pm.bodies = {body, body};
  pm.bodies[1].id = "q";
  pm.bodies[1].mass = 3.0;
  VecX x = VecX::Zero(12);
  x[3] = -1.5;
  x[9] = 1.0;
  const Mat3 i = inertia_about_global_cog(x, pm);
  const bool exact = i(0, 0) == 0.0 && i(1, 1) == 7.5 && i(2, 2) == 7.5 && i(0, 1) == 0.0 &&
                     global_cog(x, pm).norm() == 0.0;
  report(8, "physics invariants", worst_eq <= 1e-8 && worst_tr <= 1e-8 && exact,
         fmt("equivariance %.1e, trace %.1e <= 1e-8 over 100 configs; parallel axis exact: %s",
             worst_eq, worst_tr, exact ? "yes" : "no"),
         t.seconds());
}

void criterion_9() {
  Timer t;
  oracle::Rng rng(909);
  double worst_gap = 0.0, worst_viol = 0.0;
  for (int k = 0; k < 5; ++k) {
    ProblemSpec spec = oracle::random_spec(rng, 2, 4, 0, 0);
    spec.weights.volume = 1.0;
    const AtcResult r = atc_solve(spec, oracle::random_x(rng, spec, 1.0));
    worst_gap = std::max(worst_gap, r.gap);
    worst_viol = std::max(worst_viol, full_constraint_violation(spec, r.report.x_opt));
  }

  ProblemSpec single = oracle::random_spec(rng, 1, 4, 0, 0);
  single.weights.volume = 1.0;
  single.weights.cog = 1.0;
  single.cog_target = Vec3(0.3, -0.2, 0.1);
  const VecX x0 = oracle::random_x(rng, single, 1.0);
  const AtcResult a = atc_solve(single, x0);
  InitMethod init;
  init.kind = InitKind::Manual;
  init.manual = x0;
  const NestedResult n = nested_solve(single, init, NestedOptions{});
  const double df = std::abs(a.report.f_opt - n.best.f_opt);
  report(9, "ATC consistency", worst_gap <= 1e-4 && worst_viol <= 1e-6 && df <= 1e-4,
         fmt("gap %.1e <= 1e-4, violation %.1e <= 1e-6, single-object |df| %.1e <= 1e-4",
             worst_gap, worst_viol, df),
         t.seconds());
}

void criterion_10() {
  Timer t;
  oracle::Rng rng(1010);
  double worst = 0.0;
  bool rows_ok = true;
  for (int k = 0; k < 20; ++k) {
    ProblemSpec spec = oracle::random_spec(rng, 4, 3 + rng.index(4), 0, 0);
    spec.weights.volume = 1.0;
    const SoiResult r = soi_solve(spec, oracle::random_x(rng, spec, 0.8));
    worst = std::max(worst, full_constraint_violation(spec, r.report.x_opt));
    std::size_t expect = 0;
    for (const auto& [i, j] : r.active) {
      expect += spec.bodies[i].spheres.size() * spec.bodies[j].spheres.size();
    }
    rows_ok = rows_ok && r.detailed_rows == expect;
  }

  // Two five-sphere bodies started on top of each other engage immediately.
  ProblemSpec pair = oracle::random_spec(rng, 2, 5, 0, 0);
  pair.weights.volume = 1.0;
  VecX x0 = VecX::Zero(12);
  x0[9] = 0.2;
  const SoiResult p = soi_solve(pair, x0);
  const bool five = p.active.size() == 1 && p.detailed_rows == 25;
  report(10, "SOI soundness", worst <= 1e-6 && rows_ok && five,
         fmt("violation %.1e <= 1e-6 over 20 instances; rows n_i*n_j: %s; 5x5 pair -> %zu rows",
             worst, rows_ok ? "yes" : "no", p.detailed_rows),
         t.seconds());
}

void criterion_11() {
  Timer t;
  const ProblemSpec spec = make_benchmark("tail-demo", 40);
  BenchmarkOptions opt;
  opt.init.kind = InitKind::Random;
  opt.init.seed = 1;
  opt.nested.restarts = 10;
  opt.nested.jobs = 1;
  const BenchmarkResult r = run_benchmark(spec, opt, 40);
  const InclusionResult inc = hard_inclusion_check(r.best.x_opt, spec, *spec.boundary);
  const double clearance = min_body_clearance(spec, r.best.x_opt);
  report(11, "boundary-constrained property run", inc.inside_fraction() >= 0.99 && clearance >= -1e-6,
         fmt("spheres inside %zu/%zu (%.4f >= 0.99), min clearance %.2e >= -1e-6",
             inc.spheres_inside, inc.spheres_total, inc.inside_fraction(), clearance),
         t.seconds());
}

void criterion_12() {
  Timer t;
  const BenchmarkResult r = run_random("cuboid-2", 50, 1);
  const std::string again = result_to_string(make_benchmark("cuboid-2", 20), r);
  const bool same = !cuboid_result_text.empty() && again == cuboid_result_text;
  report(12, "determinism", same,
         fmt("cuboid n=2 rerun with seed 1, jobs=1: result files of %zu bytes %s", again.size(),
             same ? "identical" : "differ"),
         t.seconds());
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {
      criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5,  criterion_6,
      criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12};
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    try {
      criteria[k]();
    } catch (const std::exception& e) {
      report(static_cast<int>(k + 1), "exception", false, e.what(), 0.0);
    }
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
