#pragma once

// Seeded synthetic inputs: Gaussian classification fixtures, random dynamics
// logs and metric tables, and the bundled topic-classification corpus. All
// draws use cartograph-rng v1, so outputs are identical across platforms.

#include <cstddef>
#include <cstdint>
#include <ostream>

#include "cartograph/dynamics.hpp"
#include "cartograph/dynlog.hpp"
#include "cartograph/trainer.hpp"

namespace cartograph::synthetic {

// Class c is centered at separation * e_c (a coordinate axis, c < dim) with
// isotropic unit-variance noise. Features are dense.
struct GaussianSpec {
  int num_classes = 2;
  std::uint32_t dim = 20;
  std::size_t train = 1000;
  std::size_t validation = 200;
  std::size_t test = 200;
  double separation = 6.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
  // Validation gold labels drawn uniformly at random, independent of x.
  bool random_validation_labels = false;
};

trainer::Dataset gaussian_clusters(const GaussianSpec& spec);

struct RandomLogSpec {
  std::size_t instances = 100;
  int epochs = 5;
  int num_classes = 4;
  std::uint64_t seed = 0;
  std::string run_id = "synthetic";
};

// Dense log with p_gold uniform in [0, 1] and uniformly random preds.
dynlog::RunLog random_log(const RandomLogSpec& spec);

// Streams the same shape of log straight to `out` (epoch-major) without
// materializing it; instances are named i0000000, i0000001, ...
void write_random_log(const RandomLogSpec& spec, std::ostream& out);

// Rows with uniform confidence in [0, 1], variability in [0, 0.5] and
// correctness k/epochs; guids r0000000, r0000001, ...
dynamics::MetricsTable random_metrics(std::size_t rows, int epochs, std::uint64_t seed);

// Four-topic clinical-vocabulary corpus (cardiology, neurology, infectious
// disease, endocrinology) as dataset JSONL with a "text" field. Documents mix
// topic words, cross-topic distractors and shared filler at per-document
// difficulty levels; the ood split draws topic words from a restricted half
// of each topic vocabulary and filler from a separate list.
struct CorpusSpec {
  std::size_t train = 6000;
  std::size_t validation = 800;
  std::size_t test = 1600;
  std::size_t ood = 400;
  std::uint64_t seed = 20240101;
};

void write_topic_corpus(const CorpusSpec& spec, std::ostream& out);

}  // namespace cartograph::synthetic
