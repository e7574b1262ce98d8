#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cartograph/dynlog.hpp"

namespace cartograph::trainer {

enum class Split { train, validation, test, ood };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);  // throws std::invalid_argument

struct Feature {
  std::uint32_t index = 0;
  double value = 0.0;

  bool operator==(const Feature&) const = default;
};

// Sorted by index, no repeated indices.
using SparseVector = std::vector<Feature>;

// Hashed bag of words. Text is lowercased (ASCII), split on every byte that is
// not an ASCII letter or digit (bytes >= 0x80 stay inside tokens so UTF-8 words
// survive), each token hashed with 64-bit FNV-1a into [0, dim), and the count
// vector scaled to unit L2 norm. Empty text yields the empty vector.
SparseVector featurize(std::string_view text, std::uint32_t dim);

struct Example {
  std::string guid;
  Split split = Split::train;
  int gold = 0;
  SparseVector features;
};

struct Dataset {
  std::string name;
  int num_classes = 0;
  std::uint32_t feature_dim = 0;
  std::vector<Example> examples;

  // Positions of the examples in `split`, ordered by guid.
  std::vector<std::size_t> indices(Split split) const;
  std::size_t size(Split split) const;

  // Copy in which the train split is restricted to `train_guids`; other
  // splits are kept. Throws DataError if a guid is not a train example.
  Dataset with_train_subset(std::span<const std::string> train_guids) const;
};

struct DatasetOptions {
  std::uint32_t feature_dim = 1u << 18;
  int num_classes = 0;  // 0 infers max(gold) + 1 (at least 2)
  std::string name;     // defaults to the file stem
};

// Line-delimited JSON, one example per line:
//   {"guid":"q1","split":"train","gold":2,"text":"..."}
//   {"guid":"q1","split":"train","gold":2,"features":[[index,value],...]}
// Throws ParseError on malformed lines, DataError on duplicate guids or a gold
// label outside [0, C).
Dataset load_dataset(std::istream& in, const DatasetOptions& options);
Dataset load_dataset_file(const std::string& path, DatasetOptions options);

// Writes the "features" form of every example.
void write_dataset(const Dataset& dataset, std::ostream& out);

// Defaults follow the fine-tuning protocol being mirrored: 20 epochs, batch
// size 96, early stopping after 10 epochs without validation improvement.
struct TrainConfig {
  int epochs = 20;
  int batch_size = 96;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  int patience = 10;
  double improvement_epsilon = 0.0;
  std::uint64_t seed = 0;
  bool keep_best = false;  // also return the best-validation model

  void check() const;  // throws std::invalid_argument
};

// Parameters of the multinomial logistic regression at the end of an epoch.
// weights is num_classes x feature_dim, row-major.
struct ModelState {
  int num_classes = 0;
  std::uint32_t feature_dim = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  int epoch = 0;  // completed epochs

  static ModelState zeros(int num_classes, std::uint32_t feature_dim);

  double weight(int cls, std::uint32_t feature) const {
    return weights[static_cast<std::size_t>(cls) * feature_dim + feature];
  }

  // FNV-1a over the bit patterns of all parameters.
  std::uint64_t checksum() const;

  bool operator==(const ModelState&) const = default;
};

// Softmax of W x + b. Throws std::invalid_argument when a feature index is
// outside the model's dimension.
std::vector<double> predict_proba(const ModelState& model, const SparseVector& x);

// Argmax of predict_proba, lowest class index on ties.
int predict(const ModelState& model, const SparseVector& x);

struct CurvePoint {
  int epoch = 0;  // 1-based count of completed epochs
  double train_accuracy = 0.0;
  double validation_accuracy = 0.0;
  double mean_train_loss = 0.0;  // mean cross-entropy + (l2/2)|W|^2 on the train split

  bool operator==(const CurvePoint&) const = default;
};

using CurveLog = std::vector<CurvePoint>;

// Gradient of the objective mean_i CE(x_i, y_i) + (l2/2)|W|^2 over `batch`
// (positions into dataset.examples). The bias is not regularized. This is the
// same accumulation the SGD step uses.
struct Gradient {
  std::vector<double> weights;
  std::vector<double> bias;
  double loss = 0.0;
};

Gradient objective_gradient(const ModelState& model, const Dataset& dataset, std::span<const std::size_t> batch,
                            double l2);
double objective(const ModelState& model, const Dataset& dataset, std::span<const std::size_t> batch, double l2);

// Frozen inference over the train split (guid order): one record per training
// instance at `epoch`, never touching the parameters.
struct SnapshotPass {
  std::vector<dynlog::SnapshotRecord> records;
  double accuracy = 0.0;
  double mean_cross_entropy = 0.0;
};

SnapshotPass snapshot_pass(const ModelState& model, const Dataset& dataset, int epoch);

struct RunIdentity {
  std::string run_id = "run";
  std::string created_at;  // empty: current UTC time
};

struct TrainResult {
  ModelState model;  // last completed epoch
  std::optional<ModelState> best_model;
  CurveLog curves;
  int epochs_completed = 0;
  int best_epoch = 0;  // 1-based epoch of the best validation accuracy
  bool early_stopped = false;
};

// Mini-batch SGD on the regularized cross-entropy. Each epoch visits the train
// split in a shuffle seeded by mix_seed(config.seed, epoch); examples within a
// batch are accumulated in shuffled order. After the epoch's updates a
// snapshot pass writes one dynlog record per train instance to `log_sink`
// (when given). Training stops early once validation accuracy has failed to
// beat the best so far by more than improvement_epsilon for `patience`
// consecutive epochs. Throws DataError if the train or validation split is
// empty, TrainingError on a non-finite loss.
TrainResult train(const Dataset& dataset, const TrainConfig& config, std::ostream* log_sink = nullptr,
                  const RunIdentity& identity = {});

// Fraction of `split` whose argmax prediction equals gold. Throws DataError on
// an empty split.
double evaluate(const ModelState& model, const Dataset& dataset, Split split);

// Checkpoint: JSON with num_classes, feature_dim, epoch, bias and the nonzero
// weights as [class, feature, value] triples; doubles are written so they read
// back bit-identically.
void save_model(const ModelState& model, std::ostream& out, const std::string& run_id = {}, std::uint64_t seed = 0);
ModelState load_model(std::istream& in);

// CSV epoch,train_acc,val_acc,mean_loss preceded by a "# {...}" provenance line.
void write_curves_csv(const CurveLog& curves, std::ostream& out, const std::string& run_id = {},
                      std::uint64_t seed = 0);
CurveLog read_curves_csv(std::istream& in);

}  // namespace cartograph::trainer
