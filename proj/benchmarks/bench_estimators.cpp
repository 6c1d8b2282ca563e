#include <shepeaks/fractal_analysis.hpp>

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <vector>

using namespace shepeaks;

namespace {

std::vector<double> random_points(std::size_t n) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  for (double& x : p) x = u(gen);
  std::sort(p.begin(), p.end());
  return p;
}

}  // namespace

static void BM_BoxDimension(benchmark::State& state) {
  const fractal::ExceedanceSet s{0.0, random_points(static_cast<std::size_t>(state.range(0))),
                                 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fractal::box_dimension(s, {1.0 / 16384, 0.25}).slope);
  }
}
BENCHMARK(BM_BoxDimension)->Arg(1000)->Arg(100000);

static void BM_Capacity(benchmark::State& state) {
  const auto p = random_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fractal::kolmogorov_capacity(p, 1e-4));
}
BENCHMARK(BM_Capacity)->Arg(1000)->Arg(100000);

static void BM_FdBoxSupremum(benchmark::State& state) {
  std::uint64_t s = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fractal::fd_box_supremum(1.0, 0.01, 16.0, {1, s++}));
  }
}
BENCHMARK(BM_FdBoxSupremum)->Unit(benchmark::kMicrosecond);
