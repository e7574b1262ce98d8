#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "cartograph/error.hpp"
#include "cartograph/experiment.hpp"
#include "cartograph/synthetic.hpp"
#include "support.hpp"

using namespace cartograph;
using namespace cartograph::experiment;

namespace {

ExperimentManifest table1() {
  ExperimentManifest m;
  m.dataset = "medqa";
  m.runs = {
      {RunLabel::pretrained_baseline, "", "base", "", 0.3169, 0.2542},
      {RunLabel::full, "", "full", "", 0.3607, 0.3050},
      {RunLabel::random33, "", "rand", "", 0.3338, 0.2034},
      {RunLabel::ambiguous33, "", "amb", "", 0.3302, 0.2203},
  };
  return m;
}

}  // namespace

TEST_CASE("report replay of published numbers") {
  const auto report = render_report(table1());
  CHECK(report ==
        "| run | Test (ID) | OOD |\n"
        "|:--|:-:|:-:|\n"
        "| pretrained | 31.69 | 25.42 |\n"
        "| 100% train | **36.07** | **30.50** |\n"
        "| 33% random | 33.38 | 20.34 |\n"
        "| 33% ambiguous | 33.02 | 22.03 |\n");
}

TEST_CASE("single run is bold in both columns") {
  ExperimentManifest m;
  m.runs = {{RunLabel::full, "", "full", "", 0.5, 0.25}};
  CHECK(render_report(m).find("| 100% train | **50.00** | **25.00** |") != std::string::npos);
}

TEST_CASE("ties at the printed precision are all bold") {
  ExperimentManifest m;
  m.runs = {
      {RunLabel::full, "", "a", "", 0.40001, 0.3},
      {RunLabel::random33, "", "b", "", 0.39999, 0.31},
      {RunLabel::custom, "10% easy", "c", "", std::nullopt, 0.2},
  };
  const auto report = render_report(m);
  CHECK(report.find("| 100% train | **40.00** | 30.00 |") != std::string::npos);
  CHECK(report.find("| 33% random | **40.00** | **31.00** |") != std::string::npos);
  CHECK(report.find("| 10% easy | n/a | 20.00 |") != std::string::npos);
}

TEST_CASE("manifest checks") {
  ExperimentManifest empty;
  CHECK_THROWS_AS(render_report(empty), DataError);

  auto dup = table1();
  dup.runs.push_back(dup.runs[1]);
  CHECK_THROWS_AS(check_manifest(dup), std::invalid_argument);

  auto bad = table1();
  bad.runs[0].ood_accuracy = 1.2;
  CHECK_THROWS_AS(check_manifest(bad), std::invalid_argument);

  CHECK_THROWS_AS(manifest_from_json("{not json"), DataError);
  CHECK_THROWS_AS(parse_run_label("half"), std::invalid_argument);
  CHECK(parse_run_label("ambiguous33") == RunLabel::ambiguous33);
}

TEST_CASE("manifest JSON round trip") {
  auto m = table1();
  m.train_seed = 3;
  m.selection_seed = 4;
  m.runs.push_back({RunLabel::custom, "10% easy", "c", "easy.manifest.json", std::nullopt, 0.2});
  const auto back = manifest_from_json(to_json(m));
  CHECK(back.train_seed == 3);
  CHECK(back.selection_seed == 4);
  REQUIRE(back.runs.size() == 5);
  CHECK(back.runs[4].name == "10% easy");
  CHECK(!back.runs[4].test_accuracy.has_value());
  CHECK(back.runs[1].test_accuracy == m.runs[1].test_accuracy);
  CHECK(render_report(back) == render_report(m));
  CHECK(report_provenance(m).find("\"train_seed\":3") != std::string::npos);
}

TEST_CASE("small pipeline run") {
  testsupport::TempDir dir;
  synthetic::CorpusSpec corpus;
  corpus.train = 300;
  corpus.validation = 60;
  corpus.test = 80;
  corpus.ood = 40;
  {
    std::ofstream out(dir.file("corpus.jsonl"));
    synthetic::write_topic_corpus(corpus, out);
  }
  ExperimentConfig config;
  config.dataset_path = dir.file("corpus.jsonl");
  config.output_dir = dir.file("out");
  config.dataset_options.feature_dim = 1 << 12;
  config.train.epochs = 4;
  config.train.seed = 2;
  config.selection_seed = 5;
  config.created_at = "2024-01-01T00:00:00Z";
  const auto outcome = run_experiment(config);
  REQUIRE(outcome.manifest.runs.size() == 4);
  CHECK(outcome.manifest.runs[0].label == RunLabel::pretrained_baseline);
  CHECK(outcome.manifest.runs[3].label == RunLabel::ambiguous33);
  for (const char* name : {"full.dynlog.jsonl", "full.metrics.csv", "full.map.svg", "random33.guids.txt",
                           "ambiguous33.guids.txt.manifest.json", "experiment.json", "report.md"}) {
    CHECK(std::filesystem::exists(dir.path() / "out" / name));
  }
  CHECK(testsupport::slurp(dir.file("out/random33.guids.txt")) != testsupport::slurp(dir.file("out/ambiguous33.guids.txt")));

  config.output_dir = dir.file("again");
  config.concurrent_retrain = false;
  const auto second = run_experiment(config);
  CHECK(second.report == outcome.report);
  CHECK(testsupport::slurp(dir.file("again/ambiguous33.dynlog.jsonl")) ==
        testsupport::slurp(dir.file("out/ambiguous33.dynlog.jsonl")));
}
