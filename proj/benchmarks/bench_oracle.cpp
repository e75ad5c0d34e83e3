#include "heatcoeff/oracle.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace heatcoeff;

static void bench_assemble_scalar(benchmark::State& state) {
  FourierOperator op;
  op.g_inv = RMat::Identity(2, 2);
  op.u = FourierField::from_function(
      2, 1, {32, 1}, [](const std::vector<double>& x) { return Mat::Constant(1, 1, cplx(1.0 + 0.3 * std::cos(x[0]))); },
      12);
  op.v = {FourierField(2, 1), FourierField(2, 1)};
  op.w = FourierField(2, 1);
  OracleOptions o;
  o.cutoff = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(op, o, 0.01));
}
BENCHMARK(bench_assemble_scalar)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void bench_heat_trace(benchmark::State& state) {
  FourierOperator op;
  op.g_inv = RMat::Identity(2, 2);
  op.u = FourierField::constant(2, Mat::Identity(1, 1));
  op.v = {FourierField(2, 1), FourierField(2, 1)};
  op.w = FourierField(2, 1);
  OracleOptions o;
  o.cutoff = 16;
  const AssembledOperator a = assemble(op, o, 0.01);
  const auto data = heat_trace_data(a);
  for (auto _ : state) benchmark::DoNotOptimize(heat_trace(data, 0.05));
}
BENCHMARK(bench_heat_trace);
