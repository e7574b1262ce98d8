#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cartograph/carto.hpp"
#include "cartograph/dynamics.hpp"
#include "cartograph/dynlog.hpp"
#include "cartograph/error.hpp"
#include "cartograph/experiment.hpp"
#include "cartograph/noisebench.hpp"
#include "cartograph/provenance.hpp"
#include "cartograph/render.hpp"
#include "cartograph/synthetic.hpp"
#include "cartograph/trainer.hpp"

namespace cartograph::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::shared_ptr<spdlog::logger> logger() {
  if (auto existing = spdlog::get("cartograph")) return existing;
  auto created = spdlog::stderr_color_mt("cartograph");
  created->set_pattern("%^%l%$: %v");
  return created;
}

void configure_logging(std::ostream& err) {
  auto log = logger();
  log->set_level(spdlog::level::info);
  const char* env = std::getenv("CARTOGRAPH_LOG_LEVEL");
  if (env == nullptr || *env == '\0') return;
  const std::string name(env);
  if (name == "error") {
    log->set_level(spdlog::level::err);
  } else if (name == "warn") {
    log->set_level(spdlog::level::warn);
  } else if (name == "info") {
    log->set_level(spdlog::level::info);
  } else if (name == "debug") {
    log->set_level(spdlog::level::debug);
  } else {
    err << "warning: ignoring CARTOGRAPH_LOG_LEVEL=" << name << " (expected error, warn, info or debug)\n";
  }
}

std::ofstream open_output(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path);
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out.flush()) throw DataError("failed to write " + path);
}

// Sends text to `path`, or to `out` when path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
    logger()->info("wrote {}", path);
  }
}

std::string provenance_line(const json& fields) {
  json j = fields;
  j["tool"] = std::string(tool_version());
  return "# " + j.dump() + "\n";
}

struct TrainFlags {
  trainer::TrainConfig config;
  trainer::DatasetOptions data;
  std::string config_file;
};

void add_train_flags(CLI::App* cmd, TrainFlags& flags) {
  auto& c = flags.config;
  cmd->add_option("--epochs", c.epochs, "Maximum training epochs")->capture_default_str();
  cmd->add_option("--batch-size", c.batch_size, "Mini-batch size")->capture_default_str();
  cmd->add_option("--lr", c.learning_rate, "SGD learning rate")->capture_default_str();
  cmd->add_option("--l2", c.l2, "L2 penalty on the weights")->capture_default_str();
  cmd->add_option("--patience", c.patience, "Epochs without validation improvement before stopping")
      ->capture_default_str();
  cmd->add_option("--epsilon", c.improvement_epsilon, "Minimum validation gain counted as improvement")
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "Training seed (shuffles)")->capture_default_str();
  cmd->add_option("--feature-dim", flags.data.feature_dim, "Hashed feature dimension for text examples")
      ->capture_default_str();
  cmd->add_option("--num-classes", flags.data.num_classes, "Number of classes (0 infers from the data)")
      ->capture_default_str();
  cmd->add_option("--config", flags.config_file, "TOML or INI file of option values; command-line flags take precedence")
      ->check(CLI::ExistingFile);
}

using Action = std::function<int(std::ostream& out)>;

struct Command {
  CLI::App* app = nullptr;
  Action action;
};

// ---------------------------------------------------------------- validate

void add_validate(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    std::string log;
    bool streaming = false;
    bool allow_ragged = false;
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand("validate", "Check a dynamics log for format, bounds, density and gold drift");
  cmd->add_option("--log", flags->log, "Dynamics log (cartograph-dynlog v1)")->required();
  cmd->add_flag("--streaming", flags->streaming,
                "Constant-memory pass checking format and bounds only");
  cmd->add_flag("--allow-ragged", flags->allow_ragged, "Report missing epochs instead of failing to parse");
  commands.push_back({cmd, [flags](std::ostream& out) {
                        dynlog::ValidationReport report;
                        if (flags->streaming) {
                          std::ifstream in(flags->log, std::ios::binary);
                          if (!in) throw DataError("cannot open log: " + flags->log);
                          report = dynlog::validate_stream(in);
                        } else {
                          dynlog::ParseOptions options;
                          options.allow_ragged = flags->allow_ragged;
                          report = dynlog::validate(dynlog::read_log_file(flags->log, options));
                        }
                        if (!flags->streaming) out << "instances " << report.instances << ", ";
                        out << "records " << report.records << ", observed epochs " << report.observed_epochs
                            << "\n";
                        for (const auto& v : report.violations) {
                          out << (v.severity == dynlog::Severity::error ? "error" : "warning") << " "
                              << dynlog::to_string(v.kind) << " x" << v.count;
                          if (!v.first_guid.empty()) out << " first=" << v.first_guid;
                          if (!v.detail.empty()) out << ": " << v.detail;
                          out << "\n";
                        }
                        out << (report.valid() ? "valid" : "invalid") << "\n";
                        return report.valid() ? kExitOk : kExitData;
                      }});
}

// ---------------------------------------------------------------- metrics

void add_metrics(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    std::string log;
    std::string out;
    bool allow_ragged = false;
    unsigned threads = 0;
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand("metrics", "Compute confidence, variability and correctness per instance");
  cmd->add_option("--log", flags->log, "Dynamics log")->required();
  cmd->add_option("--out", flags->out, "Metrics CSV (default: standard output)");
  cmd->add_flag("--allow-ragged", flags->allow_ragged, "Summarize each instance over its own observed epochs");
  cmd->add_option("--threads", flags->threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
  commands.push_back({cmd, [flags](std::ostream& out) {
                        dynlog::ParseOptions parse;
                        parse.allow_ragged = flags->allow_ragged;
                        const auto log = dynlog::read_log_file(flags->log, parse);
                        const auto report = dynlog::validate(log);
                        for (const auto& v : report.violations) {
                          if (v.severity == dynlog::Severity::warning) {
                            logger()->warn("{}: {}", dynlog::to_string(v.kind), v.detail);
                          }
                        }
                        dynamics::ComputeOptions options;
                        options.allow_ragged = flags->allow_ragged;
                        options.threads = flags->threads;
                        const auto table = dynamics::compute_all(log, options);
                        std::ostringstream csv;
                        dynamics::write_csv(table, csv);
                        emit(flags->out, csv.str(), out);
                        logger()->info("{} instances over {} epochs", table.rows.size(), log.observed_epochs);
                        return kExitOk;
                      }});
}

// ---------------------------------------------------------------- classify

void add_fraction_flags(CLI::App* cmd, carto::RegionFractions& f) {
  cmd->add_option("--easy", f.easy, "Fraction labelled easy-to-learn")->capture_default_str();
  cmd->add_option("--hard", f.hard, "Fraction labelled hard-to-learn")->capture_default_str();
  cmd->add_option("--ambiguous", f.ambiguous, "Fraction labelled ambiguous")->capture_default_str();
}

void add_classify(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    std::string metrics;
    std::string out;
    carto::RegionFractions fractions;
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand("classify", "Assign easy-to-learn, hard-to-learn and ambiguous regions");
  cmd->add_option("--metrics", flags->metrics, "Metrics CSV")->required();
  cmd->add_option("--out", flags->out, "Region CSV guid,region (default: standard output)");
  add_fraction_flags(cmd, flags->fractions);
  commands.push_back({cmd, [flags](std::ostream& out) {
                        const auto table = dynamics::read_csv_file(flags->metrics);
                        const auto regions = carto::classify(table, flags->fractions);
                        std::ostringstream csv;
                        csv << provenance_line({{"source_run_id", table.meta.run_id},
                                                {"easy", flags->fractions.easy},
                                                {"hard", flags->fractions.hard},
                                                {"ambiguous", flags->fractions.ambiguous}});
                        csv << "guid,region\n";
                        for (std::size_t i = 0; i < regions.guids.size(); ++i) {
                          csv << regions.guids[i] << ',' << carto::to_string(regions.regions[i]) << '\n';
                        }
                        emit(flags->out, csv.str(), out);
                        for (auto r : {carto::Region::easy_to_learn, carto::Region::hard_to_learn,
                                       carto::Region::ambiguous, carto::Region::other}) {
                          logger()->info("{}: {}", carto::to_string(r), regions.count(r));
                        }
                        return kExitOk;
                      }});
}

// ---------------------------------------------------------------- select

void add_select(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    std::string metrics;
    std::string strategy = "ambiguous";
    double fraction = 0.33;
    std::uint64_t seed = 0;
    std::string out;
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand("select", "Write a reproducible training subset as a guid list plus manifest");
  cmd->add_option("--metrics", flags->metrics, "Metrics CSV")->required();
  cmd->add_option("--strategy", flags->strategy, "random, ambiguous, easy or hard")
      ->check(CLI::IsMember({"random", "ambiguous", "easy", "hard"}))
      ->capture_default_str();
  cmd->add_option("--fraction", flags->fraction, "Fraction of the table to select")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--seed", flags->seed, "Seed for the random strategy")->capture_default_str();
  cmd->add_option("--out", flags->out, "Guid list path (default: selection.<strategy>.txt)");
  commands.push_back({cmd, [flags](std::ostream& out) {
                        const auto table = dynamics::read_csv_file(flags->metrics);
                        carto::SelectionSpec spec;
                        spec.strategy = carto::parse_strategy(flags->strategy);
                        spec.fraction = flags->fraction;
                        spec.seed = flags->seed;
                        const auto guids = carto::select(table, spec);
                        const std::string path =
                            flags->out.empty() ? "selection." + flags->strategy + ".txt" : flags->out;
                        carto::SelectionManifest manifest{flags->strategy, flags->fraction, flags->seed,
                                                          guids.size(), table.meta.run_id,
                                                          std::string(tool_version())};
                        carto::write_selection(path, guids, manifest);
                        out << guids.size() << " of " << table.rows.size() << " instances -> " << path << "\n";
                        return kExitOk;
                      }});
}

// ---------------------------------------------------------------- rank

void add_rank(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    std::string metrics;
    std::size_t k = 100;
    std::string out;
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand("rank", "List the k most hard-to-learn instances (likely mislabels)");
  cmd->add_option("--metrics", flags->metrics, "Metrics CSV")->required();
  cmd->add_option("--k", flags->k, "Number of candidates")->capture_default_str();
  cmd->add_option("--out", flags->out, "CSV rank,guid,confidence,variability (default: standard output)");
  commands.push_back({cmd, [flags](std::ostream& out) {
                        const auto table = dynamics::read_csv_file(flags->metrics);
                        const auto ranked = carto::rank_hard_to_learn(table, flags->k);
                        std::ostringstream csv;
                        csv << provenance_line({{"source_run_id", table.meta.run_id}, {"k", flags->k}});
                        csv << "rank,guid,confidence,variability\n";
                        std::size_t rank = 1;
                        for (const auto& guid : ranked) {
                          const auto it = std::lower_bound(
                              table.rows.begin(), table.rows.end(), guid,
                              [](const dynamics::DynamicsMetrics& row, const std::string& g) { return row.guid < g; });
                          csv << rank++ << ',' << guid << ',' << format_significant(it->confidence, 9) << ','
                              << format_significant(it->variability, 9) << '\n';
                        }
                        emit(flags->out, csv.str(), out);
                        return kExitOk;
                      }});
}

// ---------------------------------------------------------------- train

void add_train(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    TrainFlags train;
    std::string data;
    std::string subset;
    std::string log_out;
    std::string curves_out;
    std::string model_out;
    std::string best_model_out;
    std::string run_id;
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand("train", "Train the softmax classifier and log per-epoch training dynamics");
  cmd->add_option("--data", flags->data, "Dataset JSONL")->required();
  cmd->add_option("--subset", flags->subset, "Restrict training to the guids listed in this file");
  cmd->add_option("--log-out", flags->log_out, "Dynamics log path")->required();
  cmd->add_option("--curves-out", flags->curves_out, "Training-curve CSV path");
  cmd->add_option("--model-out", flags->model_out, "Final model checkpoint (JSON)");
  cmd->add_option("--best-model-out", flags->best_model_out, "Best-validation model checkpoint (JSON)");
  cmd->add_option("--run-id", flags->run_id, "Run identifier (default: <dataset>-s<seed>)");
  add_train_flags(cmd, flags->train);
  commands.push_back({cmd, [flags](std::ostream& out) {
                        auto& cfg = flags->train.config;
                        cfg.keep_best = !flags->best_model_out.empty();
                        cfg.check();
                        trainer::Dataset data = trainer::load_dataset_file(flags->data, flags->train.data);
                        if (!flags->subset.empty()) {
                          data = data.with_train_subset(carto::read_guid_list(flags->subset));
                        }
                        trainer::RunIdentity identity;
                        identity.run_id = flags->run_id.empty()
                                              ? data.name + "-s" + std::to_string(cfg.seed)
                                              : flags->run_id;
                        auto log = open_output(flags->log_out);
                        const auto result = trainer::train(data, cfg, &log, identity);
                        if (!log.flush()) throw DataError("failed to write " + flags->log_out);
                        if (!flags->curves_out.empty()) {
                          auto curves = open_output(flags->curves_out);
                          trainer::write_curves_csv(result.curves, curves, identity.run_id, cfg.seed);
                        }
                        if (!flags->model_out.empty()) {
                          auto model = open_output(flags->model_out);
                          trainer::save_model(result.model, model, identity.run_id, cfg.seed);
                        }
                        if (!flags->best_model_out.empty() && result.best_model) {
                          auto model = open_output(flags->best_model_out);
                          trainer::save_model(*result.best_model, model, identity.run_id, cfg.seed);
                        }
                        const auto& last = result.curves.back();
                        out << "run " << identity.run_id << ": " << result.epochs_completed << " epochs"
                            << (result.early_stopped ? " (early stop)" : "") << ", train acc "
                            << format_significant(last.train_accuracy, 6) << ", val acc "
                            << format_significant(last.validation_accuracy, 6) << ", best epoch "
                            << result.best_epoch << "\n";
                        return kExitOk;
                      }});
}

// ---------------------------------------------------------------- evaluate

void add_evaluate(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    std::string data;
    std::string model;
    std::vector<std::string> splits{"test"};
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand("evaluate", "Accuracy of a saved model on dataset splits");
  cmd->add_option("--data", flags->data, "Dataset JSONL")->required();
  cmd->add_option("--model", flags->model, "Model checkpoint")->required();
  cmd->add_option("--split", flags->splits, "train, validation, test or ood (repeatable)")
      ->check(CLI::IsMember({"train", "validation", "test", "ood"}))
      ->capture_default_str();
  commands.push_back({cmd, [flags](std::ostream& out) {
                        std::ifstream in(flags->model, std::ios::binary);
                        if (!in) throw DataError("cannot open model: " + flags->model);
                        const auto model = trainer::load_model(in);
                        trainer::DatasetOptions options;
                        options.feature_dim = model.feature_dim;
                        options.num_classes = model.num_classes;
                        const auto data = trainer::load_dataset_file(flags->data, options);
                        for (const auto& name : flags->splits) {
                          const auto split = trainer::parse_split(name);
                          out << name << " " << format_significant(trainer::evaluate(model, data, split), 9)
                              << " (" << data.size(split) << " examples)\n";
                        }
                        return kExitOk;
                      }});
}

// ---------------------------------------------------------------- map

void add_map(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    std::string metrics;
    std::string out = "datamap.svg";
    carto::RegionFractions fractions;
    render::MapStyle style;
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand("map", "Render the data map (variability vs confidence) as SVG");
  cmd->add_option("--metrics", flags->metrics, "Metrics CSV")->required();
  cmd->add_option("--out", flags->out, "SVG path")->capture_default_str();
  cmd->add_option("--cap", flags->style.sample_cap, "Maximum markers drawn")->capture_default_str();
  cmd->add_option("--seed", flags->style.sample_seed, "Seed for thinning large tables")->capture_default_str();
  cmd->add_option("--bins", flags->style.max_correctness_bins, "Maximum correctness opacity bins")
      ->capture_default_str();
  cmd->add_option("--width", flags->style.width, "Image width in px")->capture_default_str();
  cmd->add_option("--height", flags->style.height, "Image height in px")->capture_default_str();
  cmd->add_option("--title", flags->style.title, "Plot title")->capture_default_str();
  cmd->add_flag("--histograms", flags->style.side_histograms, "Add confidence and variability histograms");
  add_fraction_flags(cmd, flags->fractions);
  commands.push_back({cmd, [flags](std::ostream& out) {
                        const auto table = dynamics::read_csv_file(flags->metrics);
                        const auto regions = carto::classify(table, flags->fractions);
                        emit(flags->out, render::render_map(table, regions, flags->style), out);
                        return kExitOk;
                      }});
}

// ---------------------------------------------------------------- curves

void add_curves(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    std::string curves;
    std::string out = "curves.svg";
    render::CurveStyle style;
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand("curves", "Render train and validation accuracy per epoch as SVG");
  cmd->add_option("--curves", flags->curves, "Training-curve CSV")->required();
  cmd->add_option("--out", flags->out, "SVG path")->capture_default_str();
  cmd->add_option("--width", flags->style.width, "Image width in px")->capture_default_str();
  cmd->add_option("--height", flags->style.height, "Image height in px")->capture_default_str();
  cmd->add_option("--title", flags->style.title, "Plot title")->capture_default_str();
  commands.push_back({cmd, [flags](std::ostream& out) {
                        std::ifstream in(flags->curves, std::ios::binary);
                        if (!in) throw DataError("cannot open curves: " + flags->curves);
                        emit(flags->out, render::render_curves(trainer::read_curves_csv(in), flags->style), out);
                        return kExitOk;
                      }});
}

// ---------------------------------------------------------------- noise-bench

void add_noise_bench(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    TrainFlags train;
    std::string data;
    synthetic::GaussianSpec gaussian{4, 50, 2000, 400, 400, 6.0, 1.0, 0, false};
    noisebench::NoiseSpec noise;
    std::optional<std::size_t> k;
    std::size_t resamples = 1000;
    std::string out;
    std::string log_out;
    std::string flipped_out;
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand("noise-bench", "Plant label flips, train, and score the mislabel ranking");
  cmd->add_option("--data", flags->data, "Dataset JSONL (default: Gaussian-cluster fixture)");
  cmd->add_option("--rate", flags->noise.rate, "Fraction of train labels to flip")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--noise-seed", flags->noise.seed, "Seed for choosing and relabelling flips")
      ->capture_default_str();
  cmd->add_option("--k", flags->k, "Ranking depth (default: number of flips)");
  cmd->add_option("--resamples", flags->resamples, "Permutation-test resamples (0 skips the test)")
      ->capture_default_str();
  cmd->add_option("--classes", flags->gaussian.num_classes, "Fixture classes")->capture_default_str();
  cmd->add_option("--dim", flags->gaussian.dim, "Fixture dimension")->capture_default_str();
  cmd->add_option("--train-size", flags->gaussian.train, "Fixture train size")->capture_default_str();
  cmd->add_option("--separation", flags->gaussian.separation, "Fixture class separation")->capture_default_str();
  cmd->add_option("--data-seed", flags->gaussian.seed, "Fixture seed")->capture_default_str();
  cmd->add_option("--out", flags->out, "Detection report JSON");
  cmd->add_option("--log-out", flags->log_out, "Dynamics log of the noisy run");
  cmd->add_option("--flipped-out", flags->flipped_out, "Guids whose labels were flipped");
  add_train_flags(cmd, flags->train);
  commands.push_back({cmd, [flags](std::ostream& out) {
                        const auto& cfg = flags->train.config;
                        cfg.check();
                        const trainer::Dataset data =
                            flags->data.empty() ? synthetic::gaussian_clusters(flags->gaussian)
                                                : trainer::load_dataset_file(flags->data, flags->train.data);
                        trainer::RunIdentity identity;
                        identity.run_id = data.name + "-noise-s" + std::to_string(cfg.seed);
                        std::ofstream log;
                        if (!flags->log_out.empty()) log = open_output(flags->log_out);
                        const auto result = noisebench::run_benchmark(data, cfg, flags->noise, flags->k,
                                                                      log.is_open() ? &log : nullptr, identity);
                        out << noisebench::format_table(result.report);
                        json report = json::parse(noisebench::to_json(result.report, flags->noise, cfg.seed));
                        if (flags->resamples > 0 && !result.flipped.empty() &&
                            result.flipped.size() < result.metrics.rows.size()) {
                          const auto perm = noisebench::permutation_test(result.metrics, result.flipped,
                                                                         flags->resamples, flags->noise.seed);
                          out << "permutation test: difference " << format_significant(perm.observed_difference, 6)
                              << ", p = " << format_significant(perm.p_value, 6) << " (" << perm.resamples
                              << " resamples)\n";
                          report["permutation_test"] = {{"observed_difference", perm.observed_difference},
                                                        {"p_value", perm.p_value},
                                                        {"resamples", perm.resamples}};
                        }
                        for (const auto& w : result.report.warnings) logger()->warn("{}", w);
                        if (!flags->out.empty()) write_text_file(flags->out, report.dump(2) + "\n");
                        if (!flags->flipped_out.empty()) {
                          std::string text;
                          for (const auto& g : result.flipped) text += g + "\n";
                          write_text_file(flags->flipped_out, text);
                        }
                        return kExitOk;
                      }});
}

// ---------------------------------------------------------------- report

void add_report(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    std::string manifest;
    std::string out;
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand("report", "Markdown comparison table from an experiment manifest");
  cmd->add_option("--manifest", flags->manifest, "Experiment manifest JSON")->required();
  cmd->add_option("--out", flags->out, "Markdown path (default: standard output)");
  commands.push_back({cmd, [flags](std::ostream& out) {
                        const auto manifest = experiment::read_manifest_file(flags->manifest);
                        std::string text = experiment::render_report(manifest);
                        if (!flags->out.empty() && flags->out != "-") text += experiment::report_provenance(manifest);
                        emit(flags->out, text, out);
                        return kExitOk;
                      }});
}

// ---------------------------------------------------------------- run-experiment

void add_run_experiment(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    TrainFlags train;
    std::string data;
    std::string out_dir = "experiment";
    double fraction = 0.33;
    std::uint64_t selection_seed = 0;
    bool sequential = false;
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand(
      "run-experiment", "Full run, metrics, ambiguous and random subsets, retraining and report in one pipeline");
  cmd->add_option("--data", flags->data, "Dataset JSONL with train, validation, test and ood splits")->required();
  cmd->add_option("--out-dir", flags->out_dir, "Directory for all artifacts")->capture_default_str();
  cmd->add_option("--fraction", flags->fraction, "Subset fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--selection-seed", flags->selection_seed, "Seed for the random subset")->capture_default_str();
  cmd->add_flag("--sequential", flags->sequential, "Retrain the two subsets one after the other");
  add_train_flags(cmd, flags->train);
  commands.push_back({cmd, [flags](std::ostream& out) {
                        experiment::ExperimentConfig config;
                        config.dataset_path = flags->data;
                        config.output_dir = flags->out_dir;
                        config.dataset_options = flags->train.data;
                        config.train = flags->train.config;
                        config.fraction = flags->fraction;
                        config.selection_seed = flags->selection_seed;
                        config.concurrent_retrain = !flags->sequential;
                        const auto outcome = experiment::run_experiment(config);
                        out << outcome.report;
                        logger()->info("artifacts in {}", flags->out_dir);
                        return kExitOk;
                      }});
}

// ---------------------------------------------------------------- make-corpus / synth-log

void add_make_corpus(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    synthetic::CorpusSpec spec;
    std::string out = "topics4.jsonl";
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand("make-corpus", "Generate the four-topic text classification corpus");
  cmd->add_option("--out", flags->out, "Dataset JSONL path")->capture_default_str();
  cmd->add_option("--train", flags->spec.train, "Train examples")->capture_default_str();
  cmd->add_option("--validation", flags->spec.validation, "Validation examples")->capture_default_str();
  cmd->add_option("--test", flags->spec.test, "Test examples")->capture_default_str();
  cmd->add_option("--ood", flags->spec.ood, "Out-of-distribution examples")->capture_default_str();
  cmd->add_option("--seed", flags->spec.seed, "Generator seed")->capture_default_str();
  commands.push_back({cmd, [flags](std::ostream&) {
                        auto out = open_output(flags->out);
                        synthetic::write_topic_corpus(flags->spec, out);
                        if (!out.flush()) throw DataError("failed to write " + flags->out);
                        return kExitOk;
                      }});
}

void add_synth_log(CLI::App& root, std::vector<Command>& commands) {
  struct Flags {
    synthetic::RandomLogSpec spec;
    std::string out;
  };
  auto flags = std::make_shared<Flags>();
  auto* cmd = root.add_subcommand("synth-log", "Write a random dense dynamics log (for scale testing)");
  cmd->add_option("--instances", flags->spec.instances, "Training instances")->capture_default_str();
  cmd->add_option("--epochs", flags->spec.epochs, "Epochs")->capture_default_str();
  cmd->add_option("--classes", flags->spec.num_classes, "Classes")->capture_default_str();
  cmd->add_option("--seed", flags->spec.seed, "Generator seed")->capture_default_str();
  cmd->add_option("--out", flags->out, "Log path; - writes to stdout")->required();
  commands.push_back({cmd, [flags](std::ostream& stdout_sink) {
                        if (flags->out == "-") {
                          synthetic::write_random_log(flags->spec, stdout_sink);
                          return kExitOk;
                        }
                        auto out = open_output(flags->out);
                        synthetic::write_random_log(flags->spec, out);
                        if (!out.flush()) throw DataError("failed to write " + flags->out);
                        return kExitOk;
                      }});
}

// Fills options that were not given on the command line from a TOML/INI file.
void apply_config_file(CLI::App& cmd, const std::string& path) {
  for (const auto& item : CLI::ConfigTOML().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && item.parents != std::vector<std::string>{cmd.get_name()}) continue;
    CLI::Option* opt = cmd.get_option_no_throw("--" + item.name);
    if (opt == nullptr || opt->get_name() == "--config") {
      throw CLI::ConversionError(item.fullname() + ": unknown option in " + path);
    }
    if (opt->count() > 0) continue;
    for (const auto& value : item.inputs) opt->add_result(value);
    opt->run_callback();
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dataset cartography: training dynamics, data maps and subset selection", "cartograph"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);
  app.fallthrough(false);

  std::vector<Command> commands;
  add_validate(app, commands);
  add_metrics(app, commands);
  add_classify(app, commands);
  add_select(app, commands);
  add_rank(app, commands);
  add_train(app, commands);
  add_evaluate(app, commands);
  add_map(app, commands);
  add_curves(app, commands);
  add_noise_bench(app, commands);
  add_report(app, commands);
  add_run_experiment(app, commands);
  add_make_corpus(app, commands);
  add_synth_log(app, commands);

  // CLI11 consumes arguments from the back.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    for (const auto& command : commands) {
      if (!command.app->parsed()) continue;
      const CLI::Option* config = command.app->get_option_no_throw("--config");
      if (config != nullptr && config->count() > 0) apply_config_file(*command.app, config->as<std::string>());
    }
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  configure_logging(err);
  for (const auto& command : commands) {
    if (!command.app->parsed()) continue;
    try {
      return command.action(out);
    } catch (const ParseError& e) {
      err << "error: " << e.what() << "\n";
      return kExitData;
    } catch (const DataError& e) {
      err << "error: " << e.what() << "\n";
      return kExitData;
    } catch (const TrainingError& e) {
      err << "error: training failed: " << e.what() << "\n";
      return kExitData;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n" << command.app->help();
      return kExitUsage;
    } catch (const std::out_of_range& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
      err << "error: " << e.what() << "\n";
      return kExitData;
    }
  }
  return kExitUsage;
}

}  // namespace cartograph::cli
