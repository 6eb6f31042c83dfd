#pragma once

// Bound-constrained augmented Lagrangian solver for
//   min f(x)  s.t.  g(x) <= 0,  lower <= x <= upper
// with a projected L-BFGS inner loop, plus finite-difference gradient tools.

#include <functional>
#include <string>
#include <vector>

#include "spi2/geometry.hpp"
#include "spi2/objectives.hpp"

namespace spi2 {

struct NlpProblem {
  std::size_t dimension = 0;
  VecX lower;
  VecX upper;
  /// f(x); adds grad f into `grad` when non-null (grad arrives zeroed).
  std::function<double(const VecX&, VecX*)> objective;
  /// g(x); may be empty for a bound-constrained problem.
  std::function<VecX(const VecX&)> constraints;
  /// grad += J(x)^T w.
  std::function<void(const VecX&, const VecX&, VecX&)> constraint_vjp;

  /// Throws DimensionError/ModelError on inconsistent sizes or missing callbacks.
  void validate() const;
};

struct SolverOptions {
  double rho0 = 10.0;
  double rho_growth = 5.0;
  double rho_max = 1e6;
  double tol_feas = 1e-6;
  double tol_grad = 1e-6;
  std::size_t max_inner = 500;
  std::size_t max_outer = 30;
  std::size_t lbfgs_memory = 10;
  /// Margin used by the feasibility restoration step that keeps the outer
  /// violation sequence non-increasing.
  double restore_margin = 1e-8;
  /// Wall-clock budget in seconds; 0 disables it.
  double time_limit = 0.0;
};

struct SolveReport {
  VecX x0;
  VecX x_opt;
  double f_opt = 0.0;
  ObjectiveBreakdown breakdown;
  double max_violation = 0.0;
  double projected_gradient = 0.0;
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
  std::size_t function_evaluations = 0;
  std::size_t jitter_events = 0;
  double wall_time = 0.0;
  bool converged = false;
  std::string termination;
  /// Max violation after each accepted outer iterate, starting with x0.
  std::vector<double> violation_history;

  bool feasible(double tol_feas = 1e-6) const { return max_violation <= tol_feas; }
};

SolveReport minimize(const NlpProblem& problem, const VecX& x0, const SolverOptions& options = {});

/// Bound-constrained minimization of a smooth function; the inner solver of
/// `minimize`, exposed for the GA and tests.
struct InnerResult {
  VecX x;
  double f = 0.0;
  double projected_gradient = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::string termination;
};
InnerResult minimize_bounded(const std::function<double(const VecX&, VecX*)>& f, const VecX& x0,
                             const VecX& lower, const VecX& upper, double tol_grad,
                             std::size_t max_iterations, std::size_t memory = 10);

/// inf-norm of P(x - grad) - x for the box [lower, upper].
double projected_gradient_norm(const VecX& x, const VecX& grad, const VecX& lower,
                               const VecX& upper);

using ScalarFunction = std::function<double(const VecX&)>;

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
VecX gradient(const ScalarFunction& f, const VecX& x, double h = 1e-6);

/// max_i |numeric_i - analytic_i| / max(1, |analytic_i|).
double check_gradient(const ScalarFunction& f, const VecX& analytic, const VecX& x,
                      double h = 1e-6);

}  // namespace spi2
