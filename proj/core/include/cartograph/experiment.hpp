#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cartograph/trainer.hpp"

namespace cartograph::experiment {

enum class RunLabel { pretrained_baseline, full, random33, ambiguous33, custom };

std::string_view to_string(RunLabel label);
RunLabel parse_run_label(std::string_view name);  // throws std::invalid_argument

struct ExperimentRun {
  RunLabel label = RunLabel::custom;
  std::string name;  // row caption for custom runs
  std::string run_id;
  std::string selection_manifest;
  std::optional<double> test_accuracy;
  std::optional<double> ood_accuracy;
};

struct ExperimentManifest {
  std::string dataset;
  std::vector<ExperimentRun> runs;
  std::uint64_t train_seed = 0;
  std::uint64_t selection_seed = 0;
  std::string created_at;
  std::string tool;
};

// Throws std::invalid_argument on duplicate labels (custom runs are keyed by
// name) or accuracies outside [0, 1].
void check_manifest(const ExperimentManifest& manifest);

std::string to_json(const ExperimentManifest& manifest);
ExperimentManifest manifest_from_json(std::string_view text);  // throws DataError
ExperimentManifest read_manifest_file(const std::string& path);

// Markdown comparison table: one row per run, columns "Test (ID)" and "OOD"
// as percentages with two decimals. In each column every value equal to the
// column maximum at the printed precision is bold, so ties are all bold.
// Missing accuracies print as "n/a". Throws DataError when no run has both
// accuracies.
std::string render_report(const ExperimentManifest& manifest);

// HTML comment carrying the manifest's seeds, run ids and tool version; placed
// after the table in report files so the rendered markdown is unchanged.
std::string report_provenance(const ExperimentManifest& manifest);

struct ExperimentConfig {
  std::string dataset_path;
  std::string output_dir;
  trainer::DatasetOptions dataset_options;
  trainer::TrainConfig train;
  double fraction = 0.33;
  std::uint64_t selection_seed = 0;
  std::string created_at;  // empty: current UTC time
  bool concurrent_retrain = true;
};

struct ExperimentOutcome {
  ExperimentManifest manifest;
  std::string report;
};

// Train on the full train split while logging dynamics, compute metrics,
// select the ambiguous and a random subset of `fraction`, retrain on each,
// evaluate every model (plus the untrained baseline) on the test and ood
// splits, and write all artifacts plus experiment.json and report.md into
// output_dir. Each subset run's logged instances are checked against its
// selection list.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

}  // namespace cartograph::experiment
