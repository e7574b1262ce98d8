#include <benchmark/benchmark.h>

#include "cartograph/carto.hpp"
#include "cartograph/dynamics.hpp"
#include "cartograph/synthetic.hpp"

using namespace cartograph;

namespace {

void BM_ComputeAll(benchmark::State& state) {
  synthetic::RandomLogSpec spec;
  spec.instances = static_cast<std::size_t>(state.range(0));
  spec.epochs = 20;
  spec.seed = 2;
  const auto log = synthetic::random_log(spec);
  const dynamics::ComputeOptions options{false, static_cast<unsigned>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::compute_all(log, options));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeAll)->Args({10000, 1})->Args({100000, 1})->Args({100000, 0})->Unit(benchmark::kMillisecond);

void BM_Select(benchmark::State& state) {
  const auto table = synthetic::random_metrics(static_cast<std::size_t>(state.range(0)), 20, 3);
  const carto::SelectionSpec spec{static_cast<carto::Strategy>(state.range(1)), 0.33, 7};
  for (auto _ : state) benchmark::DoNotOptimize(carto::select(table, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Select)
    ->ArgsProduct({{182822},
                   {static_cast<int>(carto::Strategy::random), static_cast<int>(carto::Strategy::ambiguous),
                    static_cast<int>(carto::Strategy::easy), static_cast<int>(carto::Strategy::hard)}})
    ->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const auto table = synthetic::random_metrics(182822, 20, 4);
  for (auto _ : state) benchmark::DoNotOptimize(carto::classify(table));
}
BENCHMARK(BM_Classify)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
