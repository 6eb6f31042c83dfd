#include "spi2/genetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace spi2 {

void GaOptions::validate() const {
  if (population < 4) throw ModelError("GA population must be at least 4");
  if (tournament < 1 || tournament > population) throw ModelError("invalid GA tournament size");
  if (elitism >= population) throw ModelError("GA elitism must be below the population size");
  if (crossover_rate < 0.0 || crossover_rate > 1.0) throw ModelError("invalid GA crossover rate");
  if (mutation_rate < 0.0 || mutation_rate > 1.0) throw ModelError("invalid GA mutation rate");
  if (!(mutation_sigma >= 0.0) || !(mutation_decay > 0.0)) {
    throw ModelError("invalid GA mutation parameters");
  }
}

namespace {

double safe(double f) { return std::isfinite(f) ? f : std::numeric_limits<double>::max(); }

}  // namespace

GaResult genetic_minimize(const std::function<double(const VecX&)>& fitness, const VecX& lower,
                          const VecX& upper, const GaOptions& opt, std::uint64_t seed,
                          const std::vector<VecX>& seed_population) {
  opt.validate();
  if (lower.size() != upper.size()) throw DimensionError("GA bounds differ in length");
  const Eigen::Index n = lower.size();
  const VecX range = upper - lower;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double p_mut = opt.mutation_rate > 0.0 ? opt.mutation_rate : 1.0 / std::max<Eigen::Index>(1, n);

  GaResult res;
  std::vector<VecX> pop(opt.population);
  std::vector<double> fit(opt.population);
  for (std::size_t k = 0; k < opt.population; ++k) {
    if (k < seed_population.size()) {
      if (seed_population[k].size() != n) throw DimensionError("GA seed has the wrong length");
      pop[k] = seed_population[k].cwiseMax(lower).cwiseMin(upper);
    } else {
      pop[k].resize(n);
      for (Eigen::Index i = 0; i < n; ++i) pop[k][i] = lower[i] + unit(rng) * range[i];
    }
    fit[k] = safe(fitness(pop[k]));
    ++res.evaluations;
  }

  std::vector<std::size_t> order(opt.population);
  const auto rank = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });
  };
  rank();
  res.best_history.push_back(fit[order[0]]);

  const auto tournament = [&] {
    std::uniform_int_distribution<std::size_t> pick(0, opt.population - 1);
    std::size_t best = pick(rng);
    for (std::size_t t = 1; t < opt.tournament; ++t) {
      const std::size_t c = pick(rng);
      if (fit[c] < fit[best]) best = c;
    }
    return best;
  };

  double sigma = opt.mutation_sigma;
  for (std::size_t gen = 0; gen < opt.generations; ++gen) {
    std::vector<VecX> next;
    std::vector<double> next_fit;
    next.reserve(opt.population);
    for (std::size_t e = 0; e < opt.elitism; ++e) {
      next.push_back(pop[order[e]]);
      next_fit.push_back(fit[order[e]]);
    }
    while (next.size() < opt.population) {
      const VecX& a = pop[tournament()];
      const VecX& b = pop[tournament()];
      VecX child = a;
      if (unit(rng) < opt.crossover_rate) {
        for (Eigen::Index i = 0; i < n; ++i) {
          const double lo = std::min(a[i], b[i]);
          const double span = std::abs(a[i] - b[i]);
          child[i] = lo - opt.blend_alpha * span + unit(rng) * (1.0 + 2.0 * opt.blend_alpha) * span;
        }
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        if (unit(rng) < p_mut) child[i] += sigma * range[i] * normal(rng);
      }
      child = child.cwiseMax(lower).cwiseMin(upper);
      next_fit.push_back(safe(fitness(child)));
      ++res.evaluations;
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    fit = std::move(next_fit);
    rank();
    res.best_history.push_back(fit[order[0]]);
    sigma *= opt.mutation_decay;
  }
  res.best = pop[order[0]];
  res.best_fitness = fit[order[0]];
  res.final_population = std::move(pop);
  return res;
}

}  // namespace spi2
