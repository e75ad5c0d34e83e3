#include "heatcoeff/heat_coefficients.hpp"
#include "heatcoeff/spectral_calculus.hpp"
#include "heatcoeff/spectral_functions.hpp"

#include <benchmark/benchmark.h>

using namespace heatcoeff;

static void bench_decompose(benchmark::State& state) {
  Rng rng(3);
  const Mat u = random_positive(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(u));
}
BENCHMARK(bench_decompose)->Arg(2)->Arg(8)->Arg(32);

static void bench_g_relations(benchmark::State& state) {
  const GFunctions g = g_generic(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(g_relations_residual(g, 0.7, 1.9, 2.6));
}
BENCHMARK(bench_g_relations)->Arg(2)->Arg(3)->Arg(4);

static void bench_r2_local(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(4);
  const MetricJet g = MetricJet::constant(RMat::Identity(d, d));
  PointFieldsUVW f;
  f.u = MatJet(random_positive(3, rng), d, 2);
  for (int mu = 0; mu < d; ++mu) {
    f.u.d[mu] = random_hermitian(3, rng, 0.3);
    for (int nu = 0; nu < d; ++nu) f.u.dd_at(mu, nu) = Mat::Identity(3, 3) * 0.1;
    f.v.push_back(MatJet(random_matrix(3, rng, 0.3), d, 1));
  }
  f.w = MatJet(random_matrix(3, rng, 0.3), d, 0);
  const FFunctions F = f_generic(d);
  for (auto _ : state) benchmark::DoNotOptimize(r2_local_uvw(g, f, F));
}
BENCHMARK(bench_r2_local)->Arg(2)->Arg(4);
