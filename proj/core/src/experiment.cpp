#include "cartograph/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cartograph/carto.hpp"
#include "cartograph/dynamics.hpp"
#include "cartograph/dynlog.hpp"
#include "cartograph/error.hpp"
#include "cartograph/provenance.hpp"
#include "cartograph/render.hpp"

namespace cartograph::experiment {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(RunLabel label) {
  switch (label) {
    case RunLabel::pretrained_baseline: return "pretrained-baseline";
    case RunLabel::full: return "full";
    case RunLabel::random33: return "random33";
    case RunLabel::ambiguous33: return "ambiguous33";
    case RunLabel::custom: return "custom";
  }
  return "custom";
}

RunLabel parse_run_label(std::string_view name) {
  for (auto l : {RunLabel::pretrained_baseline, RunLabel::full, RunLabel::random33, RunLabel::ambiguous33,
                 RunLabel::custom}) {
    if (name == to_string(l)) return l;
  }
  throw std::invalid_argument("unknown run label \"" + std::string(name) + "\"");
}

namespace {

std::string caption(const ExperimentRun& run) {
  switch (run.label) {
    case RunLabel::pretrained_baseline: return "pretrained";
    case RunLabel::full: return "100% train";
    case RunLabel::random33: return "33% random";
    case RunLabel::ambiguous33: return "33% ambiguous";
    case RunLabel::custom: return run.name.empty() ? run.run_id : run.name;
  }
  return run.name;
}

std::string percent(std::optional<double> acc) {
  if (!acc) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * *acc);
  return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

struct RunArtifacts {
  trainer::TrainResult result;
  std::string run_id;
};

RunArtifacts train_and_save(const trainer::Dataset& data, const trainer::TrainConfig& cfg, const fs::path& dir,
                            const std::string& stem, const std::string& run_id, const std::string& created_at) {
  RunArtifacts out;
  out.run_id = run_id;
  {
    std::ofstream log(dir / (stem + ".dynlog.jsonl"), std::ios::binary);
    if (!log) throw DataError("cannot open for writing: " + (dir / (stem + ".dynlog.jsonl")).string());
    out.result = trainer::train(data, cfg, &log, {run_id, created_at});
  }
  {
    std::ofstream curves(dir / (stem + ".curves.csv"), std::ios::binary);
    trainer::write_curves_csv(out.result.curves, curves, run_id, cfg.seed);
  }
  {
    std::ofstream model(dir / (stem + ".model.json"), std::ios::binary);
    trainer::save_model(out.result.model, model, run_id, cfg.seed);
  }
  write_text(dir / (stem + ".curves.svg"), render::render_curves(out.result.curves, {720, 480, run_id}));
  return out;
}

std::optional<double> maybe_evaluate(const trainer::ModelState& model, const trainer::Dataset& data,
                                     trainer::Split split) {
  if (data.size(split) == 0) return std::nullopt;
  return trainer::evaluate(model, data, split);
}

}  // namespace

void check_manifest(const ExperimentManifest& manifest) {
  std::set<std::string> keys;
  for (const auto& run : manifest.runs) {
    const std::string key = run.label == RunLabel::custom ? "custom:" + caption(run) : std::string(to_string(run.label));
    if (!keys.insert(key).second) throw std::invalid_argument("duplicate run label " + key);
    for (const auto& acc : {run.test_accuracy, run.ood_accuracy}) {
      if (acc && !(*acc >= 0.0 && *acc <= 1.0)) throw std::invalid_argument("accuracy outside [0, 1] in " + key);
    }
  }
}

std::string to_json(const ExperimentManifest& manifest) {
  json runs = json::array();
  for (const auto& r : manifest.runs) {
    runs.push_back({{"label", std::string(to_string(r.label))},
                    {"name", r.name},
                    {"run_id", r.run_id},
                    {"selection_manifest", r.selection_manifest},
                    {"test_accuracy", optional_number(r.test_accuracy)},
                    {"ood_accuracy", optional_number(r.ood_accuracy)}});
  }
  json j = {{"artifact", "cartograph-experiment"},
            {"tool", manifest.tool.empty() ? std::string(tool_version()) : manifest.tool},
            {"dataset", manifest.dataset},
            {"train_seed", manifest.train_seed},
            {"selection_seed", manifest.selection_seed},
            {"created_at", manifest.created_at},
            {"runs", runs}};
  return j.dump(2) + "\n";
}

ExperimentManifest manifest_from_json(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (!j.is_object()) throw DataError("experiment manifest is not a JSON object");
  try {
    ExperimentManifest m;
    m.dataset = j.value("dataset", "");
    m.train_seed = j.value("train_seed", std::uint64_t{0});
    m.selection_seed = j.value("selection_seed", std::uint64_t{0});
    m.created_at = j.value("created_at", "");
    m.tool = j.value("tool", "");
    for (const auto& r : j.at("runs")) {
      ExperimentRun run;
      run.label = parse_run_label(r.at("label").get<std::string>());
      run.name = r.value("name", "");
      run.run_id = r.value("run_id", "");
      run.selection_manifest = r.value("selection_manifest", "");
      run.test_accuracy = read_optional(r, "test_accuracy");
      run.ood_accuracy = read_optional(r, "ood_accuracy");
      m.runs.push_back(std::move(run));
    }
    check_manifest(m);
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed experiment manifest: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid experiment manifest: ") + e.what());
  }
}

ExperimentManifest read_manifest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open experiment manifest: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return manifest_from_json(buf.str());
}

std::string render_report(const ExperimentManifest& manifest) {
  check_manifest(manifest);
  const bool usable = std::any_of(manifest.runs.begin(), manifest.runs.end(),
                                  [](const ExperimentRun& r) { return r.test_accuracy && r.ood_accuracy; });
  if (!usable) throw DataError("report needs at least one run with both test and ood accuracy");

  std::string best_test, best_ood;
  auto better = [](const std::string& a, const std::string& b) {
    return b.empty() || std::stod(a) > std::stod(b);
  };
  for (const auto& r : manifest.runs) {
    if (r.test_accuracy && better(percent(r.test_accuracy), best_test)) best_test = percent(r.test_accuracy);
    if (r.ood_accuracy && better(percent(r.ood_accuracy), best_ood)) best_ood = percent(r.ood_accuracy);
  }
  auto cell = [](const std::optional<double>& acc, const std::string& best) {
    const std::string text = percent(acc);
    return acc && text == best ? "**" + text + "**" : text;
  };

  std::ostringstream out;
  out << "| run | Test (ID) | OOD |\n";
  out << "|:--|:-:|:-:|\n";
  for (const auto& r : manifest.runs) {
    out << "| " << caption(r) << " | " << cell(r.test_accuracy, best_test) << " | " << cell(r.ood_accuracy, best_ood)
        << " |\n";
  }
  return out.str();
}

std::string report_provenance(const ExperimentManifest& manifest) {
  json j;
  j["tool"] = manifest.tool.empty() ? std::string(tool_version()) : manifest.tool;
  j["dataset"] = manifest.dataset;
  j["train_seed"] = manifest.train_seed;
  j["selection_seed"] = manifest.selection_seed;
  j["created_at"] = manifest.created_at;
  auto ids = json::array();
  for (const auto& r : manifest.runs) ids.push_back(r.run_id);
  j["run_ids"] = ids;
  return "\n<!-- " + j.dump() + " -->\n";
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  config.train.check();
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  const std::string created_at = config.created_at.empty() ? utc_timestamp_now() : config.created_at;

  const trainer::Dataset data = trainer::load_dataset_file(config.dataset_path, config.dataset_options);
  const std::string seed_tag = "s" + std::to_string(config.train.seed);

  ExperimentManifest manifest;
  manifest.dataset = config.dataset_path;
  manifest.train_seed = config.train.seed;
  manifest.selection_seed = config.selection_seed;
  manifest.created_at = created_at;
  manifest.tool = std::string(tool_version());

  const auto baseline = trainer::ModelState::zeros(data.num_classes, data.feature_dim);
  manifest.runs.push_back({RunLabel::pretrained_baseline, "", data.name + "-untrained", "",
                           maybe_evaluate(baseline, data, trainer::Split::test),
                           maybe_evaluate(baseline, data, trainer::Split::ood)});

  const std::string full_id = data.name + "-full-" + seed_tag;
  RunArtifacts full = train_and_save(data, config.train, dir, "full", full_id, created_at);
  manifest.runs.push_back({RunLabel::full, "", full_id, "", maybe_evaluate(full.result.model, data, trainer::Split::test),
                           maybe_evaluate(full.result.model, data, trainer::Split::ood)});

  const auto log = dynlog::read_log_file((dir / "full.dynlog.jsonl").string());
  const auto metrics = dynamics::compute_all(log);
  dynamics::write_csv_file(metrics, (dir / "full.metrics.csv").string());
  const auto regions = carto::classify(metrics);
  render::MapStyle map_style;
  map_style.title = "Data map: " + full_id;
  write_text(dir / "full.map.svg", render::render_map(metrics, regions, map_style));

  struct Subset {
    RunLabel label;
    carto::Strategy strategy;
    std::string stem;
    std::vector<std::string> guids;
  };
  std::vector<Subset> subsets = {{RunLabel::random33, carto::Strategy::random, "random33", {}},
                                 {RunLabel::ambiguous33, carto::Strategy::ambiguous, "ambiguous33", {}}};
  for (auto& s : subsets) {
    s.guids = carto::select(metrics, {s.strategy, config.fraction, config.selection_seed});
    carto::SelectionManifest sm{std::string(carto::to_string(s.strategy)), config.fraction, config.selection_seed,
                                s.guids.size(), full_id, std::string(tool_version())};
    carto::write_selection((dir / (s.stem + ".guids.txt")).string(), s.guids, sm);
  }

  auto retrain = [&](const Subset& s) {
    const trainer::Dataset subset = data.with_train_subset(s.guids);
    const std::string id = data.name + "-" + s.stem + "-" + seed_tag;
    return train_and_save(subset, config.train, dir, s.stem, id, created_at);
  };
  std::vector<RunArtifacts> runs;
  if (config.concurrent_retrain) {
    std::vector<std::future<RunArtifacts>> pending;
    for (const auto& s : subsets) pending.push_back(std::async(std::launch::async, retrain, std::cref(s)));
    for (auto& f : pending) runs.push_back(f.get());
  } else {
    for (const auto& s : subsets) runs.push_back(retrain(s));
  }

  for (std::size_t i = 0; i < subsets.size(); ++i) {
    const auto& s = subsets[i];
    // The subset run must have consumed exactly the selected guids.
    const auto sub_log = dynlog::read_log_file((dir / (s.stem + ".dynlog.jsonl")).string());
    std::vector<std::string> logged;
    for (const auto& inst : sub_log.instances) logged.push_back(inst.guid);
    std::sort(logged.begin(), logged.end());
    const auto listed = carto::read_guid_list((dir / (s.stem + ".guids.txt")).string());
    const auto sm = carto::read_selection_manifest((dir / (s.stem + ".guids.txt.manifest.json")).string());
    if (logged != listed || sm.count != listed.size()) {
      throw DataError("subset run " + s.stem + " did not train on exactly its selected guids");
    }
    manifest.runs.push_back({s.label, "", runs[i].run_id, s.stem + ".guids.txt.manifest.json",
                             maybe_evaluate(runs[i].result.model, data, trainer::Split::test),
                             maybe_evaluate(runs[i].result.model, data, trainer::Split::ood)});
  }

  ExperimentOutcome outcome;
  outcome.manifest = manifest;
  outcome.report = render_report(manifest);
  write_text(dir / "experiment.json", to_json(manifest));
  write_text(dir / "report.md", outcome.report + report_provenance(manifest));
  return outcome;
}

}  // namespace cartograph::experiment
