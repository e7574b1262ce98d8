#include <benchmark/benchmark.h>

#include <sstream>

#include "cartograph/synthetic.hpp"
#include "cartograph/trainer.hpp"

using namespace cartograph;

namespace {

trainer::Dataset fixture(std::size_t train) {
  synthetic::GaussianSpec spec;
  spec.num_classes = 4;
  spec.dim = 50;
  spec.train = train;
  spec.validation = 400;
  spec.test = 400;
  spec.seed = 5;
  return synthetic::gaussian_clusters(spec);
}

void BM_TrainEpoch(benchmark::State& state) {
  const auto ds = fixture(static_cast<std::size_t>(state.range(0)));
  trainer::TrainConfig config;
  config.epochs = 1;
  for (auto _ : state) {
    std::ostringstream log;
    benchmark::DoNotOptimize(trainer::train(ds, config, &log));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainEpoch)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_SnapshotPass(benchmark::State& state) {
  const auto ds = fixture(20000);
  trainer::TrainConfig config;
  config.epochs = 1;
  const auto model = trainer::train(ds, config).model;
  for (auto _ : state) benchmark::DoNotOptimize(trainer::snapshot_pass(model, ds, 0));
}
BENCHMARK(BM_SnapshotPass)->Unit(benchmark::kMillisecond);

void BM_Featurize(benchmark::State& state) {
  const std::string text = "the quarterback threw a late touchdown pass as the home team rallied in the fourth quarter";
  for (auto _ : state) benchmark::DoNotOptimize(trainer::featurize(text, 1u << 16));
}
BENCHMARK(BM_Featurize);

}  // namespace

BENCHMARK_MAIN();
