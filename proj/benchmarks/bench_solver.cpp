#include <shepeaks/spde_solver.hpp>

#include <benchmark/benchmark.h>

using namespace shepeaks;

namespace {

spde::SolverConfig config() {
  spde::SolverConfig cfg;
  cfg.dx = 1.0 / 256;
  cfg.dt = cfg.dx * cfg.dx / 2;
  cfg.T = 1.0 / 64;
  cfg.L = 0.75;
  return cfg;
}

}  // namespace

static void BM_SolveConstant(benchmark::State& state) {
  std::uint64_t s = 0;
  for (auto _ : state) {
    auto f = spde::solve_she(spde::SigmaSpec::constant(1.0), config(), {1, s++});
    benchmark::DoNotOptimize(f.deviation.data().data());
  }
}
BENCHMARK(BM_SolveConstant)->Unit(benchmark::kMillisecond);

static void BM_SolveCoupledSmooth(benchmark::State& state) {
  std::uint64_t s = 0;
  for (auto _ : state) {
    auto f = spde::solve_coupled(spde::SigmaSpec::bounded_smooth(1.0), config(), {1, s++});
    benchmark::DoNotOptimize(f.u.deviation.data().data());
  }
}
BENCHMARK(BM_SolveCoupledSmooth)->Unit(benchmark::kMillisecond);
