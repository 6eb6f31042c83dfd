#pragma once

// Real-coded genetic algorithm used to pick starting points: tournament
// selection, blend crossover, Gaussian mutation and elitism.

#include <cstdint>
#include <functional>
#include <vector>

#include "spi2/geometry.hpp"

namespace spi2 {

struct GaOptions {
  std::size_t population = 30;
  std::size_t generations = 40;
  double crossover_rate = 0.9;
  double blend_alpha = 0.5;
  /// Per-gene mutation probability; 0 means 1 / dimension.
  double mutation_rate = 0.0;
  /// Mutation standard deviation as a fraction of each coordinate's range,
  /// shrunk geometrically by `mutation_decay` per generation.
  double mutation_sigma = 0.1;
  double mutation_decay = 0.9;
  std::size_t tournament = 3;
  std::size_t elitism = 1;

  void validate() const;
};

struct GaResult {
  VecX best;
  double best_fitness = 0.0;
  std::size_t evaluations = 0;
  /// Best fitness after each generation (index 0 is the initial population).
  std::vector<double> best_history;
  std::vector<VecX> final_population;
};

/// Minimizes `fitness` over the box. `seed_population`, when non-empty,
/// replaces the first individuals of the random initial population.
GaResult genetic_minimize(const std::function<double(const VecX&)>& fitness, const VecX& lower,
                          const VecX& upper, const GaOptions& options, std::uint64_t seed,
                          const std::vector<VecX>& seed_population = {});

}  // namespace spi2
