// Serial vs OpenMP timings of the replicate-parallel kernels.
// Arg = worker count; 1 runs the serial path.
#include <benchmark/benchmark.h>

#include <algorithm>

#include <omp.h>

#include "resdeloc/asymptotics.hpp"
#include "resdeloc/diagnostics.hpp"
#include "resdeloc/resonance.hpp"

using namespace resdeloc;

namespace {

Exec exec_for(const benchmark::State& st) { return Exec::with_workers(static_cast<int>(st.range(0))); }

void worker_args(benchmark::internal::Benchmark* b) {
  b->Arg(1);
  b->Arg(std::max(2, omp_get_num_procs()));
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

void BM_DosScanBox(benchmark::State& st) {
  const OperatorModel m{make_box({8, 8}), Distribution::uniform(-0.5, 0.5), 2.0, 1, 1.0};
  DosOptions opt;
  opt.exec = exec_for(st);
  const auto grid = energy_grid(-4, 4, 9);
  for (auto _ : st) benchmark::DoNotOptimize(dos_scan(m, grid, 1e-2, 400, opt));
}
BENCHMARK(BM_DosScanBox)->Apply(worker_args);

void BM_ClassifyTree(benchmark::State& st) {
  const OperatorModel m{make_tree(2, 10), Distribution::uniform(-0.5, 0.5), 0.2, 1, 1.0};
  ClassifyOptions opt;
  opt.exec = exec_for(st);
  const auto grid = energy_grid(-3, 3, 5);
  for (auto _ : st) benchmark::DoNotOptimize(classify_energies(m, grid, 20, opt));
}
BENCHMARK(BM_ClassifyTree)->Apply(worker_args);

void BM_CalibrateCutoff(benchmark::State& st) {
  const OperatorModel m{make_tree(2, 12), Distribution::uniform(-0.5, 0.5), 0.2, 1, 1.0};
  ResonanceOptions opt;
  opt.exec = exec_for(st);
  for (auto _ : st) benchmark::DoNotOptimize(calibrate_cutoff(m, 0.0, 0.1, 10, 50, opt));
}
BENCHMARK(BM_CalibrateCutoff)->Apply(worker_args);

void BM_Lyapunov(benchmark::State& st) {
  const OperatorModel m{make_tree(2, 12), Distribution::uniform(-0.5, 0.5), 1.0, 1, 1.0};
  DecayOptions opt;
  opt.d_min = 4;
  opt.d_max = 10;
  opt.exec = exec_for(st);
  for (auto _ : st) benchmark::DoNotOptimize(lyapunov(m, 0.3, 16, opt));
}
BENCHMARK(BM_Lyapunov)->Apply(worker_args);

}  // namespace

BENCHMARK_MAIN();
