// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include "knds/qnm.hpp"
#include "knds/radial.hpp"

using namespace knds;

namespace {

BlackHoleParams params() {
  BlackHoleParams p;
  p.Q = 0.3;
  p.a = 0.02;
  p.q = 0.1;
  p.Lambda = 0.04;
  return p;
}

const RadialContext& context() {
  static const RadialContext ctx(params());
  return ctx;
}

SpectrumRequest request() {
  SpectrumRequest req;
  req.ks = {0.5, -0.5};
  req.ls = {3, 4};
  req.ms = {0};
  return req;
}

void BM_RealAxisScanSerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(real_axis_scan_serial(context(), 0.5, -5, 5, -5, 5, n));
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_RealAxisScanParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(real_axis_scan(context(), 0.5, -5, 5, -5, 5, n, workers));
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_SpectrumSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(spectrum_table_serial(params(), request()));
}

void BM_SpectrumParallel(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(spectrum_table(params(), request(), {}, workers));
}

}  // namespace

BENCHMARK(BM_RealAxisScanSerial)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RealAxisScanParallel)->Args({20, 1})->Args({20, 2})->Args({20, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectrumSerial)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK(BM_SpectrumParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
