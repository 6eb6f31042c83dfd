#pragma once

// Starting-point generators and the three solution strategies built on the
// NLP solver: multi-start (nested) restarts, analytical target cascading
// and sphere-of-influence active sets.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spi2/constraints.hpp"
#include "spi2/genetic.hpp"
#include "spi2/solver.hpp"

namespace spi2 {

enum class InitKind { Random, EquallySpaced, Genetic, Manual };
enum class FitnessMode { Cheap, Refined };

std::string to_string(InitKind kind);
InitKind parse_init_kind(const std::string& name);  // random | es | ga | manual

struct InitMethod {
  InitKind kind = InitKind::Random;
  std::uint64_t seed = 1;
  std::optional<VecX> manual;
  GaOptions ga;
  FitnessMode fitness = FitnessMode::Cheap;
  /// Equally-spaced jitter as a fraction of the bound box extent.
  double jitter = 0.05;
};

/// Independent per-restart seed derived from a base seed.
std::uint64_t restart_seed(std::uint64_t seed, std::size_t index);

/// Uniform sample in the bounds; angles are drawn from [-pi, pi].
VecX init_random(const ProblemSpec& spec, std::uint64_t seed);

/// Bodies go round-robin to the 8 corners, then the 6 face centers, of the
/// translation bound box (corners ordered so consecutive bodies sit on
/// opposite corners), jittered and clamped. Control points start at the
/// midpoint of their route's ports.
VecX init_equally_spaced(const ProblemSpec& spec, std::uint64_t seed, double jitter = 0.05);

/// Best individual of a GA whose fitness is the objective plus a quadratic
/// violation penalty (Cheap) or the objective after a short NLP solve
/// (Refined).
VecX init_genetic(const ProblemSpec& spec, const GaOptions& ga, FitnessMode mode,
                  std::uint64_t seed, const SolverOptions& solver = {});

/// Starting point of restart `index`.
VecX initial_point(const ProblemSpec& spec, const InitMethod& init, std::size_t index,
                   const SolverOptions& solver = {});

/// Penalty weight on sum max(0, g)^2 in the cheap GA fitness.
inline constexpr double kGaPenalty = 100.0;

/// Wraps objective and constraint set of a spec as an NLP.
NlpProblem make_nlp(const ProblemSpec& spec, std::shared_ptr<const ConstraintSet> constraints);

/// Nudges bodies whose sphere centers coincide with another body's by 1e-10
/// so clearance gradients stay defined. Returns the number of nudges.
std::size_t separate_coincident_centers(const ProblemSpec& spec, VecX& x);

/// One NLP solve of the spec from x0. The reported violation is always
/// measured against the full Absolute constraint set.
SolveReport solve_spec(const ProblemSpec& spec, const VecX& x0, const SolverOptions& options = {},
                       const std::optional<PairSet>& active_pairs = std::nullopt);

/// Fills breakdown, f_opt and full-set violation for x_opt.
void finalize_report(const ProblemSpec& spec, SolveReport& report);

struct RestartRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  VecX x0;
  VecX x_opt;
  double f_opt = 0.0;
  double max_violation = 0.0;
  bool converged = false;
  bool feasible = false;
  std::string termination;
  double wall_time = 0.0;
  double volume = 0.0;          // exact AABB
  double routing_length = 0.0;  // linear
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
};

using LocalSolve = std::function<SolveReport(const ProblemSpec&, const VecX&)>;

struct NestedOptions {
  std::size_t restarts = 1;
  /// Worker threads; 0 picks SPI2_JOBS or the hardware concurrency.
  std::size_t jobs = 1;
  SolverOptions solver;
  /// Replaces the plain NLP solve of each restart when set.
  LocalSolve local;
};

struct NestedResult {
  SolveReport best;
  std::size_t best_index = 0;
  bool any_feasible = false;
  std::vector<RestartRecord> restarts;
};

/// Restarts ranked by (feasible first, objective, index).
NestedResult nested_solve(const ProblemSpec& spec, const InitMethod& init,
                          const NestedOptions& options);

/// Worker count from SPI2_JOBS, falling back to the hardware concurrency.
std::size_t default_jobs();

struct AtcOptions {
  double rho0 = 1.0;
  double rho_growth = 2.0;
  double rho_max = 1e5;
  double pi0 = 1.0;
  double pi_growth = 1.5;
  double pi_max = 1e4;
  double tol = 1e-4;
  double regularizer = 1e-4;
  std::size_t max_iterations = 50;
  SolverOptions solver;
};

struct AtcResult {
  SolveReport report;
  VecX x_u;
  VecX x_L;
  double gap = 0.0;
  std::size_t iterations = 0;
  std::vector<double> gap_history;
  /// Coupling weight of each system solve; 0 on the first, then increasing.
  std::vector<double> pi_history;
};

/// Placement-only specs; throws ModelError when routes are present.
AtcResult atc_solve(const ProblemSpec& spec, const VecX& x0, const AtcOptions& options = {});

struct SoiOptions {
  /// Disengaged pairs whose enclosing spheres come within this gap are
  /// activated as well as pairs whose true clearance is violated.
  double engage_margin = 1e-4;
  std::size_t max_rounds = 0;  // 0: one per body pair, plus one
  SolverOptions solver;
};

struct SoiResult {
  SolveReport report;
  PairSet active;
  /// Active pair count after each round (never decreasing).
  std::vector<std::size_t> active_history;
  std::size_t rounds = 0;
  std::size_t detailed_rows = 0;   // obj-obj rows in the final round
  std::size_t enclosing_rows = 0;
};

SoiResult soi_solve(const ProblemSpec& spec, const VecX& x0, const SoiOptions& options = {});

}  // namespace spi2
