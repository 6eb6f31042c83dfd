#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "spi2/solver.hpp"

using namespace spi2;

namespace {

NlpProblem box_problem(std::size_t n, double lo, double hi) {
  NlpProblem p;
  p.dimension = n;
  p.lower = VecX::Constant(static_cast<Eigen::Index>(n), lo);
  p.upper = VecX::Constant(static_cast<Eigen::Index>(n), hi);
  return p;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("unconstrained quadratic") {
  NlpProblem p = box_problem(1, -10, 10);
  p.objective = [](const VecX& x, VecX* g) {
    if (g) (*g)[0] += 2.0 * (x[0] - 3.0);
    return (x[0] - 3.0) * (x[0] - 3.0);
  };
  const SolveReport r = minimize(p, VecX::Zero(1));
  CHECK(r.converged);
  CHECK(r.x_opt[0] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("active inequality") {
  NlpProblem p = box_problem(1, -10, 10);
  p.objective = [](const VecX& x, VecX* g) {
    if (g) (*g)[0] += 2.0 * x[0];
    return x[0] * x[0];
  };
  p.constraints = [](const VecX& x) { return VecX::Constant(1, 1.0 - x[0]); };
  p.constraint_vjp = [](const VecX&, const VecX& w, VecX& g) { g[0] -= w[0]; };
  const SolveReport r = minimize(p, VecX::Constant(1, -4.0));
  CHECK(r.converged);
  CHECK(r.x_opt[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.max_violation <= 1e-6);
}

TEST_CASE("two spheres on a line") {
  // Radius-1 centers x0, x1; smooth length lse(x + 1) + lse(-(x - 1)) with
  // alpha = 50, subject to x1 - x0 >= 2.
  const double alpha = 50.0;
  NlpProblem p = box_problem(2, -10, 10);
  p.objective = [alpha](const VecX& x, VecX* g) {
    const auto lse = [alpha](double a, double b, double& wa, double& wb) {
      const double m = std::max(a, b);
      const double ea = std::exp(alpha * (a - m)), eb = std::exp(alpha * (b - m));
      wa = ea / (ea + eb);
      wb = eb / (ea + eb);
      return m + std::log(ea + eb) / alpha;
    };
    double a0, a1, b0, b1;
    const double hi = lse(x[0] + 1.0, x[1] + 1.0, a0, a1);
    const double lo = lse(1.0 - x[0], 1.0 - x[1], b0, b1);
    if (g) {
      (*g)[0] += a0 - b0;
      (*g)[1] += a1 - b1;
    }
    return hi + lo;
  };
  p.constraints = [](const VecX& x) { return VecX::Constant(1, 2.0 - (x[1] - x[0])); };
  p.constraint_vjp = [](const VecX&, const VecX& w, VecX& g) {
    g[0] += w[0];
    g[1] -= w[0];
  };
  const SolveReport r = minimize(p, (VecX(2) << 0.0, 5.0).finished());
  CHECK(r.max_violation <= 1e-6);
  const double gap = r.x_opt[1] - r.x_opt[0];
  CHECK(std::abs(gap - 2.0) <= 1e-3);
  CHECK(std::abs(gap + 2.0 - 4.0) <= 1e-3);
}

TEST_CASE("bounds are respected") {
  NlpProblem p = box_problem(3, -1, 1);
  p.objective = [](const VecX& x, VecX* g) {
    if (g) *g += 2.0 * (x - VecX::Constant(3, 5.0));
    return (x - VecX::Constant(3, 5.0)).squaredNorm();
  };
  const SolveReport r = minimize(p, VecX::Constant(3, 7.0));
  CHECK(r.converged);
  CHECK((r.x_opt - VecX::Ones(3)).norm() < 1e-9);
}

TEST_CASE("violation history is monotone and feasible starts keep their objective") {
  oracle::Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4, m = 3;
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(m, n);
    const VecX c = rng.vecx(n, -2, 2);
    const VecX b = rng.vecx(m, 0.1, 1.0);
    NlpProblem p = box_problem(n, -5, 5);
    p.objective = [c](const VecX& x, VecX* g) {
      if (g) *g += 2.0 * (x - c);
      return (x - c).squaredNorm();
    };
    p.constraints = [a, b](const VecX& x) { return VecX(a * x - b); };
    p.constraint_vjp = [a](const VecX&, const VecX& w, VecX& g) { g += a.transpose() * w; };
    // x = 0 is feasible since b > 0.
    const SolveReport r = minimize(p, VecX::Zero(n));
    for (std::size_t k = 1; k < r.violation_history.size(); ++k) {
      CHECK(r.violation_history[k] <= r.violation_history[k - 1] + 1e-12);
    }
    CHECK(r.f_opt <= c.squaredNorm() + 1e-12);
    CHECK(r.max_violation <= 1e-6);

    const SolveReport s = minimize(p, rng.vecx(n, -5, 5));
    for (std::size_t k = 1; k < s.violation_history.size(); ++k) {
      CHECK(s.violation_history[k] <= s.violation_history[k - 1] + 1e-12);
    }
  }
}

TEST_CASE("identical inputs give identical reports") {
  NlpProblem p = box_problem(2, -3, 3);
  p.objective = [](const VecX& x, VecX* g) {
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    if (g) {
      (*g)[0] += -2.0 * a - 400.0 * x[0] * b;
      (*g)[1] += 200.0 * b;
    }
    return a * a + 100.0 * b * b;
  };
  p.constraints = [](const VecX& x) { return VecX::Constant(1, x.squaredNorm() - 1.5); };
  p.constraint_vjp = [](const VecX& x, const VecX& w, VecX& g) { g += 2.0 * w[0] * x; };
  const VecX x0 = (VecX(2) << -1.2, 1.0).finished();
  const SolveReport a = minimize(p, x0), b = minimize(p, x0);
  CHECK(a.x_opt == b.x_opt);
  CHECK(a.f_opt == b.f_opt);
  CHECK(a.violation_history == b.violation_history);
  CHECK(a.inner_iterations == b.inner_iterations);
}

TEST_CASE("non-finite start") {
  NlpProblem p = box_problem(1, -1, 1);
  p.objective = [](const VecX&, VecX*) { return std::numeric_limits<double>::quiet_NaN(); };
  const SolveReport r = minimize(p, VecX::Zero(1));
  CHECK_FALSE(r.converged);
  CHECK(r.termination == "non-finite value at x0");
}

TEST_CASE("problem validation") {
  NlpProblem p = box_problem(2, -1, 1);
  CHECK_THROWS_AS(minimize(p, VecX::Zero(2)), ModelError);  // no objective
  p.objective = [](const VecX&, VecX*) { return 0.0; };
  CHECK_THROWS_AS(minimize(p, VecX::Zero(3)), DimensionError);
  p.constraints = [](const VecX&) { return VecX::Zero(1); };
  CHECK_THROWS_AS(minimize(p, VecX::Zero(2)), ModelError);  // no vjp
}

TEST_CASE("finite-difference harness") {
  const auto sq = [](const VecX& x) { return x.squaredNorm(); };
  oracle::Rng rng(72);
  const VecX x = rng.vecx(5, -2, 2);
  CHECK((gradient(sq, x) - 2.0 * x).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(check_gradient(sq, 2.0 * x, x) < 1e-8);
  CHECK(gradient([](const VecX&) { return 4.0; }, x).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(check_gradient(sq, VecX::Zero(5), x) > 0.1);
  CHECK_THROWS_AS(gradient(sq, x, 0.0), std::invalid_argument);
}

TEST_CASE("projected gradient norm") {
  const VecX lo = VecX::Zero(2), hi = VecX::Ones(2);
  // At the lower bound with a positive gradient the coordinate is optimal.
  CHECK(projected_gradient_norm(VecX::Zero(2), VecX::Ones(2), lo, hi) == 0.0);
  CHECK(projected_gradient_norm(VecX::Constant(2, 0.5), VecX::Constant(2, 0.1), lo, hi) ==
        doctest::Approx(0.1));
}

}  // TEST_SUITE
