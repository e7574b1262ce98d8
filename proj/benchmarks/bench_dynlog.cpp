#include <benchmark/benchmark.h>

#include <sstream>
#include <string>

#include "cartograph/dynlog.hpp"
#include "cartograph/synthetic.hpp"

using namespace cartograph;

namespace {

std::string make_log_text(std::size_t instances, int epochs) {
  synthetic::RandomLogSpec spec;
  spec.instances = instances;
  spec.epochs = epochs;
  spec.seed = 1;
  std::ostringstream out;
  synthetic::write_random_log(spec, out);
  return out.str();
}

void BM_ParseLog(benchmark::State& state) {
  const auto text = make_log_text(static_cast<std::size_t>(state.range(0)), 10);
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(dynlog::parse_log(in));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 10);
}
BENCHMARK(BM_ParseLog)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ValidateStream(benchmark::State& state) {
  const auto text = make_log_text(static_cast<std::size_t>(state.range(0)), 10);
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(dynlog::validate_stream(in));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ValidateStream)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_FormatRecord(benchmark::State& state) {
  const dynlog::SnapshotRecord record{7, "i0001234", 2, 0.7312345678901234, 1};
  for (auto _ : state) benchmark::DoNotOptimize(dynlog::format_record(record));
}
BENCHMARK(BM_FormatRecord);

}  // namespace

BENCHMARK_MAIN();
