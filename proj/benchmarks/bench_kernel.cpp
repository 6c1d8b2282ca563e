#include <shepeaks/kernel_math.hpp>

#include <benchmark/benchmark.h>

using namespace shepeaks;

static void BM_IncompleteGreen(benchmark::State& state) {
  double a = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel::incomplete_green(1.0, a));
    a = a < 10.0 ? a + 0.01 : 0.0;
  }
}
BENCHMARK(BM_IncompleteGreen);

static void BM_SpatialCovariance(benchmark::State& state) {
  double lag = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel::spatial_covariance(0.01, lag));
    lag = lag < 0.5 ? lag + 1e-3 : 0.0;
  }
}
BENCHMARK(BM_SpatialCovariance);

// Adaptive quadrature per call; the sampler cache amortises this.
static void BM_TruncatedCovariance(benchmark::State& state) {
  double lag = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel::truncated_covariance_lag(0.01, 0.1, lag));
    lag = lag < 0.4 ? lag + 7e-3 : 0.0;
  }
}
BENCHMARK(BM_TruncatedCovariance);
