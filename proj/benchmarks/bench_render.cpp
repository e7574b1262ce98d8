#include <benchmark/benchmark.h>

#include "cartograph/carto.hpp"
#include "cartograph/render.hpp"
#include "cartograph/synthetic.hpp"

using namespace cartograph;

namespace {

void BM_RenderMap(benchmark::State& state) {
  const auto table = synthetic::random_metrics(static_cast<std::size_t>(state.range(0)), 20, 9);
  const auto regions = carto::classify(table);
  render::MapStyle style;
  style.side_histograms = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(render::render_map(table, regions, style));
}
BENCHMARK(BM_RenderMap)->Args({10000, 0})->Args({182822, 0})->Args({182822, 1})->Unit(benchmark::kMillisecond);

void BM_MapSample(benchmark::State& state) {
  const render::MapStyle style;
  for (auto _ : state) benchmark::DoNotOptimize(render::map_sample(182822, style));
}
BENCHMARK(BM_MapSample)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
