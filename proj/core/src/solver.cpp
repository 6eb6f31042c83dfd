#include "spi2/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

namespace spi2 {

void NlpProblem::validate() const {
  if (!objective) throw ModelError("NLP needs an objective");
  if (static_cast<std::size_t>(lower.size()) != dimension ||
      static_cast<std::size_t>(upper.size()) != dimension) {
    throw DimensionError("NLP bounds do not match dimension " + std::to_string(dimension));
  }
  if ((lower.array() > upper.array()).any()) throw ModelError("NLP lower bound above upper");
  if (constraints && !constraint_vjp) throw ModelError("NLP constraints need a gradient");
}

double projected_gradient_norm(const VecX& x, const VecX& grad, const VecX& lower,
                               const VecX& upper) {
  return ((x - grad).cwiseMax(lower).cwiseMin(upper) - x).lpNorm<Eigen::Infinity>();
}

namespace {

constexpr double kArmijo = 1e-4;
constexpr std::size_t kMaxBacktracks = 60;
constexpr double kMonotoneSlack = 1e-12;

bool finite(const VecX& v) { return v.allFinite(); }

double max_violation(const VecX& g) {
  return g.size() == 0 ? 0.0 : std::max(0.0, g.maxCoeff());
}

// Two-loop recursion restricted to the free variables.
VecX lbfgs_direction(const VecX& g, const std::vector<char>& free,
                     const std::deque<std::pair<VecX, VecX>>& memory) {
  const auto mask = [&](VecX v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (!free[i]) v[i] = 0.0;
    }
    return v;
  };
  VecX q = mask(g);
  std::vector<double> alpha(memory.size()), rho(memory.size());
  for (std::size_t k = memory.size(); k-- > 0;) {
    const VecX s = mask(memory[k].first);
    const VecX y = mask(memory[k].second);
    const double sy = s.dot(y);
    rho[k] = sy > 0.0 ? 1.0 / sy : 0.0;
    alpha[k] = rho[k] * s.dot(q);
    q -= alpha[k] * y;
  }
  if (!memory.empty()) {
    const VecX s = mask(memory.back().first);
    const VecX y = mask(memory.back().second);
    const double yy = y.squaredNorm();
    if (yy > 0.0 && s.dot(y) > 0.0) q *= s.dot(y) / yy;
  }
  for (std::size_t k = 0; k < memory.size(); ++k) {
    const VecX s = mask(memory[k].first);
    const VecX y = mask(memory[k].second);
    const double beta = rho[k] * y.dot(q);
    q += (alpha[k] - beta) * s;
  }
  return -mask(q);
}

}  // namespace

InnerResult minimize_bounded(const std::function<double(const VecX&, VecX*)>& f, const VecX& x0,
                             const VecX& lower, const VecX& upper, double tol_grad,
                             std::size_t max_iterations, std::size_t memory_size) {
  InnerResult out;
  const Eigen::Index n = x0.size();
  VecX x = x0.cwiseMax(lower).cwiseMin(upper);
  VecX g = VecX::Zero(n);
  double fx = f(x, &g);
  ++out.evaluations;
  if (!std::isfinite(fx) || !finite(g)) {
    out.x = x;
    out.f = fx;
    out.projected_gradient = std::numeric_limits<double>::infinity();
    out.termination = "non-finite value at start";
    return out;
  }
  std::deque<std::pair<VecX, VecX>> memory;
  std::vector<char> free(n);
  VecX gn(n);
  out.termination = "iteration limit";
  std::size_t flat = 0;
  for (; out.iterations < max_iterations; ++out.iterations) {
    out.projected_gradient = projected_gradient_norm(x, g, lower, upper);
    if (out.projected_gradient <= tol_grad) {
      out.termination = "gradient tolerance";
      break;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      free[i] = !((x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0));
    }
    VecX d = lbfgs_direction(g, free, memory);
    if (!(d.dot(g) < 0.0)) {
      memory.clear();
      d = lbfgs_direction(g, free, memory);
    }
    double t = memory.empty() ? std::min(1.0, 1.0 / d.lpNorm<Eigen::Infinity>()) : 1.0;
    VecX xn;
    double fn = fx;
    bool accepted = false;
    for (std::size_t bt = 0; bt < kMaxBacktracks; ++bt, t *= 0.5) {
      xn = (x + t * d).cwiseMax(lower).cwiseMin(upper);
      gn.setZero();
      fn = f(xn, &gn);
      ++out.evaluations;
      if (std::isfinite(fn) && finite(gn) && fn < fx &&
          fn <= fx + kArmijo * g.dot(xn - x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      out.termination = "line search stalled";
      break;
    }
    const VecX s = xn - x;
    const VecX y = gn - g;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      memory.emplace_back(s, y);
      if (memory.size() > memory_size) memory.pop_front();
    }
    flat = (fx - fn <= 1e-15 * std::max(1.0, std::abs(fx))) ? flat + 1 : 0;
    x = xn;
    fx = fn;
    g = gn;
    if (flat >= 5) {
      out.termination = "no progress";
      ++out.iterations;
      break;
    }
  }
  out.projected_gradient = projected_gradient_norm(x, g, lower, upper);
  out.x = std::move(x);
  out.f = fx;
  return out;
}

SolveReport minimize(const NlpProblem& p, const VecX& x0, const SolverOptions& opt) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - started).count(); };
  p.validate();
  if (static_cast<std::size_t>(x0.size()) != p.dimension) {
    throw DimensionError("x0 has length " + std::to_string(x0.size()) + ", expected " +
                         std::to_string(p.dimension));
  }

  SolveReport rep;
  rep.x0 = x0;
  VecX x = x0.cwiseMax(p.lower).cwiseMin(p.upper);
  const auto cons = [&](const VecX& v) { return p.constraints ? p.constraints(v) : VecX(); };
  const auto finish = [&](const VecX& xf, bool converged, std::string why) {
    rep.x_opt = xf;
    rep.f_opt = p.objective(xf, nullptr);
    rep.max_violation = max_violation(cons(xf));
    rep.converged = converged;
    rep.termination = std::move(why);
    rep.wall_time = elapsed();
    return rep;
  };

  VecX g = cons(x);
  const double f_start = p.objective(x, nullptr);
  ++rep.function_evaluations;
  if (!std::isfinite(f_start) || !finite(g)) return finish(x, false, "non-finite value at x0");

  const Eigen::Index m = g.size();
  VecX lambda = VecX::Zero(m);
  double rho = opt.rho0;
  double viol = max_violation(g);
  double raw_prev = viol;
  rep.violation_history.push_back(viol);

  const auto augmented = [&](const VecX& v, VecX* grad) {
    VecX gv = cons(v);
    const double fv = p.objective(v, grad);
    if (m == 0) return fv;
    const VecX shifted = (lambda + rho * gv).cwiseMax(0.0);
    const double pen = (shifted.squaredNorm() - lambda.squaredNorm()) / (2.0 * rho);
    if (grad) p.constraint_vjp(v, shifted, *grad);
    return fv + pen;
  };
  const auto kkt_residual = [&](const VecX& v) {
    VecX grad = VecX::Zero(v.size());
    p.objective(v, &grad);
    if (m > 0) p.constraint_vjp(v, lambda, grad);
    return projected_gradient_norm(v, grad, p.lower, p.upper);
  };
  const auto restore = [&](const VecX& start) {
    const auto feas = [&](const VecX& v, VecX* grad) {
      const VecX excess = (cons(v).array() + opt.restore_margin).cwiseMax(0.0).matrix();
      if (grad) p.constraint_vjp(v, 2.0 * excess, *grad);
      return excess.squaredNorm();
    };
    InnerResult r = minimize_bounded(feas, start, p.lower, p.upper, 0.0, 200, opt.lbfgs_memory);
    rep.inner_iterations += r.iterations;
    rep.function_evaluations += r.evaluations;
    return r.x;
  };

  double fx = f_start;
  for (std::size_t k = 0; k < opt.max_outer; ++k) {
    rep.outer_iterations = k + 1;
    const double inner_tol = std::max(opt.tol_grad, 1e-3 * std::pow(0.1, static_cast<double>(k)));
    InnerResult r = minimize_bounded(augmented, x, p.lower, p.upper, inner_tol, opt.max_inner,
                                     opt.lbfgs_memory);
    rep.inner_iterations += r.iterations;
    rep.function_evaluations += r.evaluations;
    if (!std::isfinite(r.f)) return finish(x, false, "non-finite augmented Lagrangian");

    const VecX g_raw = cons(r.x);
    const double raw = max_violation(g_raw);
    lambda = (lambda + rho * g_raw).cwiseMax(0.0);

    // Accepted iterates never increase the violation, and once feasible they
    // never increase the objective either.
    VecX candidate = r.x;
    double cand_viol = raw;
    bool rejected = false;
    if (cand_viol > viol + kMonotoneSlack) {
      VecX restored = restore(r.x);
      cand_viol = max_violation(cons(restored));
      candidate = std::move(restored);
      rejected = cand_viol > viol + kMonotoneSlack;
    }
    double f_cand = fx;
    if (!rejected) {
      f_cand = p.objective(candidate, nullptr);
      ++rep.function_evaluations;
      rejected = viol <= opt.tol_feas && !(f_cand <= fx);
    }
    const bool rho_capped = rho >= opt.rho_max;
    if (rejected || raw > std::max(opt.tol_feas, 0.25 * raw_prev)) {
      rho = std::min(rho * opt.rho_growth, opt.rho_max);
    }
    raw_prev = raw;

    const VecX previous = x;
    if (!rejected) {
      x = std::move(candidate);
      viol = cand_viol;
      fx = f_cand;
    }
    rep.violation_history.push_back(viol);

    rep.projected_gradient = kkt_residual(x);
    double complementarity = 0.0;
    if (m > 0) {
      complementarity = lambda.cwiseMin((-cons(x)).cwiseMax(0.0)).maxCoeff();
    }
    if (viol <= opt.tol_feas && rep.projected_gradient <= opt.tol_grad &&
        complementarity <= opt.tol_grad) {
      return finish(x, true, "kkt tolerance");
    }
    // A loose early inner tolerance may stop before the first step, so only
    // a final-accuracy inner solve that does not move counts as stationary.
    if (!rejected && viol <= opt.tol_feas && inner_tol <= opt.tol_grad &&
        (x - previous).lpNorm<Eigen::Infinity>() <= 1e-10) {
      return finish(x, true, "stationary iterate");
    }
    if (rejected && rho_capped) {
      return finish(x, viol <= opt.tol_feas, "no feasible descent");
    }
    if (opt.time_limit > 0.0 && elapsed() > opt.time_limit) {
      return finish(x, false, "time limit");
    }
  }
  return finish(x, false, "outer iteration limit");
}

VecX gradient(const ScalarFunction& f, const VecX& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  VecX g(x.size());
  VecX xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    xp[i] = xi + h;
    const double fp = f(xp);
    xp[i] = xi - h;
    const double fm = f(xp);
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double check_gradient(const ScalarFunction& f, const VecX& analytic, const VecX& x, double h) {
  const VecX numeric = gradient(f, x, h);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    worst = std::max(worst, std::abs(numeric[i] - analytic[i]) / std::max(1.0, std::abs(analytic[i])));
  }
  return worst;
}

}  // namespace spi2
