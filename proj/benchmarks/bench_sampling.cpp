#include <shepeaks/gaussian_field.hpp>
#include <shepeaks/noise.hpp>

#include <benchmark/benchmark.h>

#include <vector>

using namespace shepeaks;

static void BM_CellNormals(benchmark::State& state) {
  std::vector<double> out(static_cast<std::size_t>(state.range(0)));
  const auto key = noise::stream_key({1, 0});
  std::int64_t row = 0;
  for (auto _ : state) {
    noise::cell_normals(key, row++, -7, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CellNormals)->Arg(1024)->Arg(16384);

static void BM_SliceDraw(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const field::SpatialSliceSampler s(0.001, field::UniformGrid{0.0, 1.0 / (n - 1), n});
  noise::Rng rng(noise::SeedSpec{2, 0});
  std::vector<double> out(n);
  for (auto _ : state) {
    s.draw(rng, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SliceDraw)->Arg(1025)->Arg(16385);

static void BM_TemporalSamplerSetup(benchmark::State& state) {
  std::vector<double> times;
  for (int k = 40; k >= 4; --k) times.push_back(std::ldexp(1.0, -k));
  for (auto _ : state) {
    field::TemporalTraceSampler s(times);
    benchmark::DoNotOptimize(&s);
  }
}
BENCHMARK(BM_TemporalSamplerSetup);
