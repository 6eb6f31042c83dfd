#include "spi2/frameworks.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "spi2/objectives.hpp"

namespace spi2 {

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::Random: return "random";
    case InitKind::EquallySpaced: return "es";
    case InitKind::Genetic: return "ga";
    case InitKind::Manual: return "manual";
  }
  return "random";
}

InitKind parse_init_kind(const std::string& name) {
  if (name == "random") return InitKind::Random;
  if (name == "es" || name == "equally-spaced") return InitKind::EquallySpaced;
  if (name == "ga" || name == "genetic") return InitKind::Genetic;
  if (name == "manual") return InitKind::Manual;
  throw ModelError("unknown init method '" + name + "' (expected random, es, ga or manual)");
}

std::uint64_t restart_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 over (seed, index)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

double angle_range(const ProblemSpec& spec) {
  return std::min(std::numbers::pi, spec.bounds.angle_limit);
}

Vec3 uniform_in(const Vec3& lo, const Vec3& hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec3 p;
  for (int a = 0; a < 3; ++a) p[a] = lo[a] + unit(rng) * (hi[a] - lo[a]);
  return p;
}

}  // namespace

VecX init_random(const ProblemSpec& spec, std::uint64_t seed) {
  const DesignLayout layout = spec.layout();
  std::mt19937_64 rng(seed);
  const double a = angle_range(spec);
  std::uniform_real_distribution<double> angle(-a, a);
  VecX x(layout.dimension());
  for (std::size_t i = 0; i < layout.n_bodies(); ++i) {
    const std::size_t o = layout.pose_offset(i);
    for (int k = 0; k < 3; ++k) x[o + k] = angle(rng);
    x.segment<3>(o + 3) = uniform_in(spec.bounds.lower, spec.bounds.upper, rng);
  }
  for (std::size_t r = 0; r < layout.n_routes(); ++r) {
    for (std::size_t k = 0; k < layout.n_control_points(r); ++k) {
      x.segment<3>(layout.control_point_offset(r, k)) =
          uniform_in(spec.bounds.lower, spec.bounds.upper, rng);
    }
  }
  return x;
}

VecX init_equally_spaced(const ProblemSpec& spec, std::uint64_t seed, double jitter) {
  if (jitter < 0.0) throw ModelError("jitter must be >= 0");
  const DesignLayout layout = spec.layout();
  const Vec3& lo = spec.bounds.lower;
  const Vec3& hi = spec.bounds.upper;
  const Vec3 mid = 0.5 * (lo + hi);
  const Vec3 extent = hi - lo;
  // Corner pairs are opposite; then the six face centers.
  const auto pick = [&](int sx, int sy, int sz) {
    const auto c = [&](int s, int a) { return s < 0 ? lo[a] : (s > 0 ? hi[a] : mid[a]); };
    return Vec3(c(sx, 0), c(sy, 1), c(sz, 2));
  };
  const std::vector<Vec3> slots{
      pick(-1, -1, -1), pick(1, 1, 1),  pick(1, -1, -1), pick(-1, 1, 1), pick(-1, 1, -1),
      pick(1, -1, 1),   pick(-1, -1, 1), pick(1, 1, -1), pick(-1, 0, 0), pick(1, 0, 0),
      pick(0, -1, 0),   pick(0, 1, 0),   pick(0, 0, -1), pick(0, 0, 1)};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  const double a = angle_range(spec);
  VecX x = VecX::Zero(layout.dimension());
  for (std::size_t i = 0; i < layout.n_bodies(); ++i) {
    const std::size_t o = layout.pose_offset(i);
    for (int k = 0; k < 3; ++k) x[o + k] = a * sym(rng);
    Vec3 t = slots[i % slots.size()];
    for (int k = 0; k < 3; ++k) t[k] += jitter * extent[k] * sym(rng);
    x.segment<3>(o + 3) = t.cwiseMax(lo).cwiseMin(hi);
  }
  const WorldFrame frame = spec.frame(layout, x);
  for (std::size_t r = 0; r < layout.n_routes(); ++r) {
    const Route& route = spec.routes[r];
    const Vec3 p0 = frame.port(route.from);
    const Vec3 p1 = frame.port(route.to);
    const std::size_t n = layout.n_control_points(r);
    for (std::size_t k = 0; k < n; ++k) {
      Vec3 q = 0.5 * (p0 + p1);
      for (int c = 0; c < 3; ++c) q[c] += jitter * extent[c] * sym(rng);
      x.segment<3>(layout.control_point_offset(r, k)) = q.cwiseMax(lo).cwiseMin(hi);
    }
  }
  return x;
}

VecX init_genetic(const ProblemSpec& spec, const GaOptions& ga, FitnessMode mode,
                  std::uint64_t seed, const SolverOptions& solver) {
  VecX lower = lower_bounds(spec);
  VecX upper = upper_bounds(spec);
  const DesignLayout layout = spec.layout();
  const double a = angle_range(spec);
  for (std::size_t i = 0; i < layout.n_bodies(); ++i) {
    lower.segment<3>(layout.pose_offset(i)).setConstant(-a);
    upper.segment<3>(layout.pose_offset(i)).setConstant(a);
  }
  const auto set = std::make_shared<const ConstraintSet>(spec, ConstraintMode{});
  std::function<double(const VecX&)> fitness;
  if (mode == FitnessMode::Cheap) {
    fitness = [&](const VecX& x) {
      const VecX excess = set->evaluate(x).cwiseMax(0.0);
      return total_objective(x, spec).total + kGaPenalty * excess.squaredNorm();
    };
  } else {
    fitness = [&](const VecX& x) {
      const SolveReport r = minimize(make_nlp(spec, set), x, solver);
      return r.f_opt + kGaPenalty * r.max_violation * r.max_violation;
    };
  }
  return genetic_minimize(fitness, lower, upper, ga, seed).best;
}

VecX initial_point(const ProblemSpec& spec, const InitMethod& init, std::size_t index,
                   const SolverOptions& solver) {
  const std::uint64_t seed = restart_seed(init.seed, index);
  switch (init.kind) {
    case InitKind::Random: return init_random(spec, seed);
    case InitKind::EquallySpaced: return init_equally_spaced(spec, seed, init.jitter);
    case InitKind::Genetic: return init_genetic(spec, init.ga, init.fitness, seed, solver);
    case InitKind::Manual:
      if (!init.manual) throw ModelError("manual init needs a starting vector");
      spec.layout().check(*init.manual);
      return *init.manual;
  }
  return init_random(spec, seed);
}

NlpProblem make_nlp(const ProblemSpec& spec, std::shared_ptr<const ConstraintSet> set) {
  NlpProblem p;
  const DesignLayout layout = spec.layout();
  p.dimension = layout.dimension();
  p.lower = lower_bounds(spec);
  p.upper = upper_bounds(spec);
  const ProblemSpec* s = &spec;
  p.objective = [s, layout](const VecX& x, VecX* grad) {
    return total_objective(s->frame(layout, x), *s, s->weights, grad).total;
  };
  if (set->size() > 0) {
    p.constraints = [set](const VecX& x) { return set->evaluate(x); };
    p.constraint_vjp = [set](const VecX& x, const VecX& w, VecX& grad) {
      set->accumulate_gradient(x, w, grad);
    };
  }
  return p;
}

std::size_t separate_coincident_centers(const ProblemSpec& spec, VecX& x) {
  const DesignLayout layout = spec.layout();
  std::size_t events = 0;
  for (std::size_t i = 0; i < spec.bodies.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.bodies.size(); ++j) {
      const WorldFrame frame = spec.frame(layout, x);
      const auto ci = frame.sphere_centers(i);
      const auto cj = frame.sphere_centers(j);
      const bool coincident = std::any_of(ci.begin(), ci.end(), [&](const Vec3& a) {
        return std::any_of(cj.begin(), cj.end(),
                           [&](const Vec3& b) { return (a - b).squaredNorm() < 1e-24; });
      });
      if (coincident) {
        x[layout.translation_offset(j)] += 1e-10;
        ++events;
      }
    }
  }
  return events;
}

void finalize_report(const ProblemSpec& spec, SolveReport& report) {
  report.breakdown = total_objective(report.x_opt, spec);
  report.f_opt = report.breakdown.total;
  report.max_violation = full_constraint_violation(spec, report.x_opt);
}

SolveReport solve_spec(const ProblemSpec& spec, const VecX& x0, const SolverOptions& options,
                       const std::optional<PairSet>& active_pairs) {
  const auto set = std::make_shared<const ConstraintSet>(spec, spec.constraint_mode, active_pairs);
  VecX x = clamp_to_bounds(spec, x0);
  const std::size_t jitter = separate_coincident_centers(spec, x);
  SolveReport r = minimize(make_nlp(spec, set), x, options);
  r.x0 = x0;
  r.jitter_events = jitter;
  finalize_report(spec, r);
  return r;
}

std::size_t default_jobs() {
  if (const char* env = std::getenv("SPI2_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

NestedResult nested_solve(const ProblemSpec& spec, const InitMethod& init,
                          const NestedOptions& options) {
  if (options.restarts < 1) throw ModelError("nested solve needs at least one restart");
  const std::size_t n = options.restarts;
  std::vector<SolveReport> reports(n);
  std::vector<RestartRecord> records(n);

  const auto run = [&](std::size_t k) {
    const VecX x0 = initial_point(spec, init, k, options.solver);
    SolveReport r = options.local ? options.local(spec, x0) : solve_spec(spec, x0, options.solver);
    RestartRecord& rec = records[k];
    rec.index = k;
    rec.seed = restart_seed(init.seed, k);
    rec.x0 = x0;
    rec.x_opt = r.x_opt;
    rec.f_opt = r.f_opt;
    rec.max_violation = r.max_violation;
    rec.converged = r.converged;
    rec.feasible = r.max_violation <= options.solver.tol_feas;
    rec.termination = r.termination;
    rec.wall_time = r.wall_time;
    rec.volume = exact_aabb_volume(r.x_opt, spec);
    rec.routing_length = routing_length_linear(r.x_opt, spec);
    rec.outer_iterations = r.outer_iterations;
    rec.inner_iterations = r.inner_iterations;
    reports[k] = std::move(r);
  };

  const std::size_t jobs = std::min(n, options.jobs == 0 ? default_jobs() : options.jobs);
  if (jobs <= 1) {
    for (std::size_t k = 0; k < n; ++k) run(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t k = next++; k < n; k = next++) {
          try {
            run(k);
          } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    workers.clear();
    if (failure) std::rethrow_exception(failure);
  }

  NestedResult out;
  std::size_t best = 0;
  const auto better = [&](std::size_t a, std::size_t b) {
    const RestartRecord& ra = records[a];
    const RestartRecord& rb = records[b];
    if (ra.feasible != rb.feasible) return ra.feasible;
    if (!ra.feasible && ra.max_violation != rb.max_violation) {
      return ra.max_violation < rb.max_violation;
    }
    if (ra.f_opt != rb.f_opt) return ra.f_opt < rb.f_opt;
    return a < b;
  };
  for (std::size_t k = 1; k < n; ++k) {
    if (better(k, best)) best = k;
  }
  out.best_index = best;
  out.any_feasible = records[best].feasible;
  out.best = std::move(reports[best]);
  out.restarts = std::move(records);
  return out;
}

AtcResult atc_solve(const ProblemSpec& spec, const VecX& x0, const AtcOptions& opt) {
  if (!spec.routes.empty()) throw ModelError("ATC handles placement-only problems (no routes)");
  const auto started = std::chrono::steady_clock::now();
  const DesignLayout layout = spec.layout();
  const std::size_t nb = spec.bodies.size();
  const std::size_t dof = DesignLayout::kPoseDof;
  const VecX lo = lower_bounds(spec);
  const VecX hi = upper_bounds(spec);

  AtcResult res;
  VecX x_u = clamp_to_bounds(spec, x0);
  const std::size_t jitter = separate_coincident_centers(spec, x_u);
  VecX x_L = x_u;
  VecX lambda = VecX::Zero(x_u.size());
  double rho = opt.rho0;
  double pi = opt.pi0;

  const auto full = std::make_shared<const ConstraintSet>(spec, ConstraintMode{});
  std::vector<ConstraintSet> local_sets;
  for (std::size_t i = 0; i < nb; ++i) {
    PairSet pairs;
    for (std::size_t j = 0; j < nb; ++j) {
      if (j != i) pairs.insert({std::min(i, j), std::max(i, j)});
    }
    local_sets.push_back(ConstraintSet::body_pairs_only(spec, ConstraintMode{}, pairs));
  }

  SolveReport system;
  std::size_t inner = 0;
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    res.iterations = it + 1;
    // No subsystem responses exist before the first pass.
    const double coupling = it == 0 ? 0.0 : pi;
    res.pi_history.push_back(coupling);

    NlpProblem sys = make_nlp(spec, full);
    sys.objective = [base = sys.objective, &x_L, coupling](const VecX& x, VecX* grad) {
      const VecX d = x - x_L;
      if (grad) *grad += coupling * d;
      return base(x, grad) + 0.5 * coupling * d.squaredNorm();
    };
    system = minimize(sys, x_u, opt.solver);
    inner += system.inner_iterations;
    x_u = system.x_opt;
    const VecX gamma = x_u;

    for (std::size_t i = 0; i < nb; ++i) {
      const std::size_t o = layout.pose_offset(i);
      const ConstraintSet& set = local_sets[i];
      const VecX target = gamma.segment(o, dof);
      const VecX lam = lambda.segment(o, dof);
      const auto embed = [&](const VecX& y) {
        VecX z = x_u;
        z.segment(o, dof) = y;
        return z;
      };
      NlpProblem sub;
      sub.dimension = dof;
      sub.lower = lo.segment(o, dof);
      sub.upper = hi.segment(o, dof);
      const double reg = opt.regularizer;
      sub.objective = [&, reg](const VecX& y, VecX* grad) {
        const VecX d = y - target;
        if (grad) *grad += 2.0 * reg * y + lam + rho * d;
        return reg * y.squaredNorm() + lam.dot(d) + 0.5 * rho * d.squaredNorm();
      };
      if (set.size() > 0) {
        sub.constraints = [&](const VecX& y) { return set.evaluate(embed(y)); };
        sub.constraint_vjp = [&](const VecX& y, const VecX& w, VecX& grad) {
          VecX g = VecX::Zero(x_u.size());
          set.accumulate_gradient(embed(y), w, g);
          grad += g.segment(o, dof);
        };
      }
      const SolveReport r = minimize(sub, target, opt.solver);
      inner += r.inner_iterations;
      x_L.segment(o, dof) = r.x_opt;
    }

    lambda += rho * (x_L - gamma);
    res.gap = (x_u - x_L).lpNorm<Eigen::Infinity>();
    res.gap_history.push_back(res.gap);
    if (res.gap <= opt.tol) break;
    rho = std::min(rho * opt.rho_growth, opt.rho_max);
    if (it > 0) pi = std::min(pi * opt.pi_growth, opt.pi_max);
  }

  res.x_u = x_u;
  res.x_L = x_L;
  res.report = std::move(system);
  res.report.x0 = x0;
  res.report.x_opt = x_u;
  res.report.jitter_events = jitter;
  res.report.inner_iterations = inner;
  res.report.outer_iterations = res.iterations;
  finalize_report(spec, res.report);
  res.report.converged = res.gap <= opt.tol && res.report.max_violation <= opt.solver.tol_feas;
  res.report.termination = res.gap <= opt.tol ? "consistency tolerance" : "iteration limit";
  res.report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return res;
}

namespace {

double pair_clearance(const WorldFrame& frame, std::size_t i, std::size_t j) {
  double best = std::numeric_limits<double>::infinity();
  const auto ci = frame.sphere_centers(i);
  const auto cj = frame.sphere_centers(j);
  for (std::size_t a = 0; a < ci.size(); ++a) {
    for (std::size_t b = 0; b < cj.size(); ++b) {
      best = std::min(best, (ci[a] - cj[b]).norm() - frame.sphere_radius(i, a) -
                                frame.sphere_radius(j, b));
    }
  }
  return best;
}

}  // namespace

SoiResult soi_solve(const ProblemSpec& spec, const VecX& x0, const SoiOptions& opt) {
  const auto started = std::chrono::steady_clock::now();
  const std::size_t nb = spec.bodies.size();
  const std::size_t n_pairs = nb * (nb - 1) / 2;
  const std::size_t max_rounds = opt.max_rounds > 0 ? opt.max_rounds : n_pairs + 1;
  std::vector<EnclosingSphere> enclosing;
  for (const auto& b : spec.bodies) enclosing.push_back(enclosing_sphere(b));
  const DesignLayout layout = spec.layout();

  SoiResult res;
  VecX x = x0;
  std::size_t inner = 0, outer = 0;
  while (true) {
    const ConstraintSet set(spec, spec.constraint_mode, res.active);
    res.detailed_rows = set.term_count(ConstraintKind::ObjObj);
    res.enclosing_rows = set.term_count(ConstraintKind::Enclosing);
    res.report = solve_spec(spec, x, opt.solver, res.active);
    inner += res.report.inner_iterations;
    outer += res.report.outer_iterations;
    x = res.report.x_opt;
    ++res.rounds;

    const WorldFrame frame = spec.frame(layout, x);
    std::size_t added = 0;
    for (std::size_t i = 0; i < nb; ++i) {
      for (std::size_t j = i + 1; j < nb; ++j) {
        if (res.active.contains({i, j})) continue;
        const double enclosing_gap =
            (frame.world_point(i, enclosing[i].center) - frame.world_point(j, enclosing[j].center))
                .norm() -
            enclosing[i].radius - enclosing[j].radius;
        if (enclosing_gap <= opt.engage_margin ||
            pair_clearance(frame, i, j) < -opt.solver.tol_feas) {
          res.active.insert({i, j});
          ++added;
        }
      }
    }
    res.active_history.push_back(res.active.size());
    if (added == 0 || res.rounds >= max_rounds) break;
  }
  res.report.x0 = x0;
  res.report.inner_iterations = inner;
  res.report.outer_iterations = outer;
  res.report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return res;
}

}  // namespace spi2
