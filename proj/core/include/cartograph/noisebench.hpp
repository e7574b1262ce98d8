#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cartograph/dynamics.hpp"
#include "cartograph/trainer.hpp"

namespace cartograph::noisebench {

struct NoiseSpec {
  double rate = 0.1;  // fraction of the train split to relabel
  std::uint64_t seed = 0;
};

struct NoisyDataset {
  trainer::Dataset dataset;
  std::vector<std::string> flipped;  // sorted guids whose gold was replaced
};

// Relabels floor(rate * N_train + 0.5) train instances, chosen uniformly from
// the guid-sorted train split, each to a uniformly drawn class different from
// its original one. Other splits are untouched. Throws std::invalid_argument
// for a rate outside [0, 1] or fewer than 2 classes, DataError for an empty
// train split.
NoisyDataset inject_noise(const trainer::Dataset& dataset, const NoiseSpec& spec);

struct DetectionReport {
  std::size_t n_instances = 0;
  std::size_t n_flipped = 0;
  std::size_t k = 0;
  std::size_t hits = 0;  // |top-k ∩ flipped|
  double precision_at_k = 0.0;
  double recall_at_k = 0.0;  // 0 when nothing was flipped
  double base_rate = 0.0;
  double lift = 0.0;  // precision / base_rate; 0 when base_rate is 0
  double mean_confidence_flipped = 0.0;  // NaN when nothing was flipped
  double mean_confidence_clean = 0.0;    // NaN when everything was flipped
  std::vector<std::string> warnings;
};

// Scores rank_hard_to_learn(table, k) against the planted flips. Throws
// std::out_of_range unless 1 <= k <= N, DataError if a flipped guid is not in
// the table.
DetectionReport eval_detection(const dynamics::MetricsTable& table, const std::vector<std::string>& flipped,
                               std::size_t k);

// One-sided permutation test of "flipped instances have lower mean confidence
// than clean ones". p = (1 + #{permutations with difference <= observed}) /
// (1 + resamples), difference = mean(flipped) - mean(clean).
struct PermutationTest {
  double observed_difference = 0.0;
  double p_value = 1.0;
  std::size_t resamples = 0;
};

PermutationTest permutation_test(const dynamics::MetricsTable& table, const std::vector<std::string>& flipped,
                                 std::size_t resamples, std::uint64_t seed);

struct BenchmarkResult {
  DetectionReport report;
  std::vector<std::string> flipped;
  trainer::TrainResult training;
  dynamics::MetricsTable metrics;
};

// inject_noise -> train -> compute_all -> eval_detection. k defaults to the
// number of flips (at least 1). The dynamics log of the noisy run is written
// to log_sink when given.
BenchmarkResult run_benchmark(const trainer::Dataset& dataset, const trainer::TrainConfig& config,
                              const NoiseSpec& noise, std::optional<std::size_t> k = std::nullopt,
                              std::ostream* log_sink = nullptr, const trainer::RunIdentity& identity = {});

std::string to_json(const DetectionReport& report, const NoiseSpec& noise, std::uint64_t train_seed);
std::string format_table(const DetectionReport& report);

}  // namespace cartograph::noisebench
