#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cartograph/dynlog.hpp"

namespace cartograph::dynamics {

// Mean gold-label probability over the observed epochs. Throws
// std::invalid_argument on an empty series.
double confidence(std::span<const double> p_gold);

// Population standard deviation of the gold-label probability: squared
// deviations from the mean are summed and divided by the number of epochs
// E, not E - 1. Values in [0, 1] give a result in [0, 0.5].
double variability(std::span<const double> p_gold);

// Fraction of epochs whose argmax prediction equals gold; one of E + 1
// values k / E. NaN if any prediction is dynlog::kNoPrediction.
double correctness(std::span<const int> preds, int gold);

struct DynamicsMetrics {
  std::string guid;
  double confidence = 0.0;
  double variability = 0.0;
  double correctness = 0.0;
  int epochs_used = 0;
};

// One row per logged instance, sorted by guid.
struct MetricsTable {
  dynlog::RunMeta meta;
  std::vector<DynamicsMetrics> rows;
};

struct ComputeOptions {
  // Accept instances missing some epochs; each is then summarized over its
  // own observed epochs.
  bool allow_ragged = false;
  // Worker threads; 0 picks std::thread::hardware_concurrency(). Output is
  // identical for every thread count.
  unsigned threads = 0;
};

// Throws DataError on an empty grid (no epochs), on a ragged grid unless
// allow_ragged, or on gold drift within an instance.
MetricsTable compute_all(const dynlog::RunLog& log, const ComputeOptions& options = {});

// CSV: a "# {...}" provenance comment line carrying the run metadata, then
// the header guid,confidence,variability,correctness,epochs_used and one row
// per instance with values at 9 significant digits.
void write_csv(const MetricsTable& table, std::ostream& out);
void write_csv_file(const MetricsTable& table, const std::string& path);

// Reads write_csv output (the comment line is optional). Throws ParseError.
MetricsTable read_csv(std::istream& in);
MetricsTable read_csv_file(const std::string& path);

}  // namespace cartograph::dynamics
