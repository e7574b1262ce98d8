#include "cartograph/noisebench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "cartograph/carto.hpp"
#include "cartograph/error.hpp"
#include "cartograph/provenance.hpp"
#include "cartograph/rng.hpp"

namespace cartograph::noisebench {

namespace {

double mean_or_nan(double sum, std::size_t n) {
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

}  // namespace

NoisyDataset inject_noise(const trainer::Dataset& dataset, const NoiseSpec& spec) {
  if (!(spec.rate >= 0.0 && spec.rate <= 1.0)) throw std::invalid_argument("noise rate must lie in [0, 1]");
  if (dataset.num_classes < 2) throw std::invalid_argument("noise injection needs at least 2 classes");
  const auto train = dataset.indices(trainer::Split::train);
  if (train.empty()) throw DataError("train split is empty");

  const auto n_flip =
      static_cast<std::size_t>(std::floor(spec.rate * static_cast<double>(train.size()) + 0.5));
  NoisyDataset out{dataset, {}};
  Rng rng(spec.seed);
  for (std::size_t pos : sample_without_replacement(train.size(), std::min(n_flip, train.size()), rng)) {
    auto& ex = out.dataset.examples[train[pos]];
    const auto draw = static_cast<int>(rng.below(static_cast<std::uint64_t>(dataset.num_classes - 1)));
    ex.gold = draw < ex.gold ? draw : draw + 1;
    out.flipped.push_back(ex.guid);
  }
  std::sort(out.flipped.begin(), out.flipped.end());
  return out;
}

DetectionReport eval_detection(const dynamics::MetricsTable& table, const std::vector<std::string>& flipped,
                               std::size_t k) {
  const std::size_t n = table.rows.size();
  if (k < 1 || k > n) throw std::out_of_range("k must lie in [1, " + std::to_string(n) + "]");
  std::unordered_set<std::string> flips(flipped.begin(), flipped.end());

  DetectionReport r;
  r.n_instances = n;
  r.k = k;
  double sum_flipped = 0.0;
  double sum_clean = 0.0;
  std::size_t found = 0;
  for (const auto& row : table.rows) {
    if (flips.count(row.guid) != 0) {
      sum_flipped += row.confidence;
      ++found;
    } else {
      sum_clean += row.confidence;
    }
  }
  if (found != flips.size()) throw DataError("flipped set names guids that are not in the metrics table");
  r.n_flipped = flips.size();

  for (const auto& guid : carto::rank_hard_to_learn(table, k)) {
    if (flips.count(guid) != 0) ++r.hits;
  }
  r.precision_at_k = static_cast<double>(r.hits) / static_cast<double>(k);
  r.recall_at_k = r.n_flipped == 0 ? 0.0 : static_cast<double>(r.hits) / static_cast<double>(r.n_flipped);
  r.base_rate = static_cast<double>(r.n_flipped) / static_cast<double>(n);
  if (r.base_rate > 0.0) {
    r.lift = r.precision_at_k / r.base_rate;
  } else {
    r.lift = 0.0;
    r.warnings.push_back("no flipped instances: recall and lift are undefined and reported as 0");
  }
  r.mean_confidence_flipped = mean_or_nan(sum_flipped, found);
  r.mean_confidence_clean = mean_or_nan(sum_clean, n - found);
  return r;
}

PermutationTest permutation_test(const dynamics::MetricsTable& table, const std::vector<std::string>& flipped,
                                 std::size_t resamples, std::uint64_t seed) {
  std::unordered_set<std::string> flips(flipped.begin(), flipped.end());
  std::vector<double> values;
  values.reserve(table.rows.size());
  std::size_t n_flip = 0;
  // Flipped first so the observed labelling is the first n_flip positions.
  for (const auto& row : table.rows) {
    if (flips.count(row.guid) != 0) {
      values.push_back(row.confidence);
      ++n_flip;
    }
  }
  for (const auto& row : table.rows) {
    if (flips.count(row.guid) == 0) values.push_back(row.confidence);
  }
  const std::size_t n = values.size();
  if (n_flip == 0 || n_flip == n) throw std::invalid_argument("permutation test needs both flipped and clean instances");

  double total = 0.0;
  for (double v : values) total += v;
  auto difference = [&](const std::vector<double>& xs) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_flip; ++i) s += xs[i];
    return s / static_cast<double>(n_flip) - (total - s) / static_cast<double>(n - n_flip);
  };

  PermutationTest t;
  t.resamples = resamples;
  t.observed_difference = difference(values);
  Rng rng(seed);
  std::vector<double> shuffled = values;
  std::size_t as_extreme = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    rng.shuffle(std::span<double>(shuffled));
    if (difference(shuffled) <= t.observed_difference) ++as_extreme;
  }
  t.p_value = static_cast<double>(1 + as_extreme) / static_cast<double>(1 + resamples);
  return t;
}

BenchmarkResult run_benchmark(const trainer::Dataset& dataset, const trainer::TrainConfig& config,
                              const NoiseSpec& noise, std::optional<std::size_t> k, std::ostream* log_sink,
                              const trainer::RunIdentity& identity) {
  NoisyDataset noisy = inject_noise(dataset, noise);
  BenchmarkResult result;
  // The log goes through the on-disk format so the benchmark measures exactly
  // what an external consumer of the file would see.
  std::ostringstream buffer;
  result.training = trainer::train(noisy.dataset, config, &buffer, identity);
  const std::string text = buffer.str();
  if (log_sink != nullptr) {
    log_sink->write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!*log_sink) throw DataError("dynamics log write failed");
  }
  std::istringstream in(text);
  result.metrics = dynamics::compute_all(dynlog::parse_log(in));

  const std::size_t top = k.value_or(std::max<std::size_t>(1, noisy.flipped.size()));
  result.report = eval_detection(result.metrics, noisy.flipped, top);
  result.flipped = std::move(noisy.flipped);
  return result;
}

std::string to_json(const DetectionReport& r, const NoiseSpec& noise, std::uint64_t train_seed) {
  auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
  nlohmann::json j = {
      {"artifact", "cartograph-detection-report"},
      {"tool", std::string(tool_version())},
      {"noise_rate", noise.rate},
      {"noise_seed", noise.seed},
      {"train_seed", train_seed},
      {"n_instances", r.n_instances},
      {"n_flipped", r.n_flipped},
      {"k", r.k},
      {"hits", r.hits},
      {"precision_at_k", r.precision_at_k},
      {"recall_at_k", r.recall_at_k},
      {"base_rate", r.base_rate},
      {"lift", r.lift},
      {"mean_confidence_flipped", num(r.mean_confidence_flipped)},
      {"mean_confidence_clean", num(r.mean_confidence_clean)},
      {"warnings", r.warnings},
  };
  return j.dump(2);
}

std::string format_table(const DetectionReport& r) {
  auto fmt = [](double v) { return std::isnan(v) ? std::string("n/a") : format_significant(v, 4); };
  std::ostringstream out;
  out << "| metric | value |\n|---|---|\n";
  out << "| instances | " << r.n_instances << " |\n";
  out << "| flipped | " << r.n_flipped << " |\n";
  out << "| k | " << r.k << " |\n";
  out << "| hits@k | " << r.hits << " |\n";
  out << "| precision@k | " << fmt(r.precision_at_k) << " |\n";
  out << "| recall@k | " << fmt(r.recall_at_k) << " |\n";
  out << "| base rate | " << fmt(r.base_rate) << " |\n";
  out << "| lift | " << fmt(r.lift) << " |\n";
  out << "| mean confidence (flipped) | " << fmt(r.mean_confidence_flipped) << " |\n";
  out << "| mean confidence (clean) | " << fmt(r.mean_confidence_clean) << " |\n";
  for (const auto& w : r.warnings) out << "\nwarning: " << w << '\n';
  return out.str();
}

}  // namespace cartograph::noisebench
