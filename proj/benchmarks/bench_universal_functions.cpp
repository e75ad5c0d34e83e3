#include "heatcoeff/universal_functions.hpp"

#include <benchmark/benchmark.h>

using namespace heatcoeff;

static void bench_i_eval_distinct(benchmark::State& state) {
  const std::vector<double> rs{0.7, 1.3, 2.1, 3.4};
  for (auto _ : state) benchmark::DoNotOptimize(i_eval(2.5, rs));
}
BENCHMARK(bench_i_eval_distinct);

static void bench_i_eval_confluent(benchmark::State& state) {
  const std::vector<double> rs{1.3, 1.3 * (1.0 + 1e-9), 2.1};
  for (auto _ : state) benchmark::DoNotOptimize(i_eval(3.0, rs));
}
BENCHMARK(bench_i_eval_confluent);

static void bench_i_quadrature(benchmark::State& state) {
  const SimplexArgs args(2.5, {0.7, 1.3, 2.1});
  for (auto _ : state) benchmark::DoNotOptimize(i_quadrature(args));
}
BENCHMARK(bench_i_quadrature);
