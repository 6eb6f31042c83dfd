#include <benchmark/benchmark.h>

#include <random>

#include "spi2/benchmarks.hpp"
#include "spi2/constraints.hpp"
#include "spi2/objectives.hpp"

namespace {

spi2::VecX random_point(const spi2::ProblemSpec& spec, std::uint64_t seed) {
  return spi2::init_random(spec, seed);
}

void BM_ConstraintEvaluate(benchmark::State& state) {
  const auto spec = spi2::make_benchmark("cuboid-4", static_cast<std::size_t>(state.range(0)));
  const spi2::ConstraintSet set(spec, spec.constraint_mode);
  const spi2::VecX x = random_point(spec, 3);
  for (auto _ : state) benchmark::DoNotOptimize(set.evaluate(x));
  state.counters["rows"] = static_cast<double>(set.size());
}
BENCHMARK(BM_ConstraintEvaluate)->Arg(20)->Arg(40);

void BM_ConstraintGradient(benchmark::State& state) {
  const auto spec = spi2::make_benchmark("cuboid-4", static_cast<std::size_t>(state.range(0)));
  const spi2::ConstraintSet set(spec, spec.constraint_mode);
  const spi2::VecX x = random_point(spec, 3);
  const spi2::VecX w = spi2::VecX::Ones(static_cast<Eigen::Index>(set.size()));
  spi2::VecX grad(x.size());
  for (auto _ : state) {
    grad.setZero();
    set.accumulate_gradient(x, w, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_ConstraintGradient)->Arg(20)->Arg(40);

void BM_TotalObjective(benchmark::State& state) {
  const auto spec = spi2::make_benchmark("tail-demo", 40);
  const spi2::VecX x = random_point(spec, 5);
  spi2::VecX grad(x.size());
  for (auto _ : state) {
    grad.setZero();
    benchmark::DoNotOptimize(spi2::total_objective(x, spec, &grad).total);
  }
}
BENCHMARK(BM_TotalObjective);

void BM_SingleSolve(benchmark::State& state) {
  const auto spec = spi2::make_benchmark("cuboid-2", 20);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto r = spi2::solve_spec(spec, random_point(spec, seed++));
    benchmark::DoNotOptimize(r.f_opt);
  }
}
BENCHMARK(BM_SingleSolve)->Unit(benchmark::kMillisecond)->Iterations(5);

}  // namespace

BENCHMARK_MAIN();
