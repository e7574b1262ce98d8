#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "cartograph/carto.hpp"
#include "cartograph/dynamics.hpp"
#include "cartograph/synthetic.hpp"
#include "cli.hpp"
#include "support.hpp"

using namespace cartograph;
using cartograph::cli::dispatch;
using testsupport::slurp;
using testsupport::spit;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

int run_exe(const std::string& args) {
  const std::string cmd = std::string(CARTOGRAPH_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_log(const testsupport::TempDir& dir, std::size_t instances, int epochs) {
  synthetic::RandomLogSpec spec;
  spec.instances = instances;
  spec.epochs = epochs;
  spec.seed = 3;
  const auto path = dir.file("run.jsonl");
  std::ostringstream text;
  synthetic::write_random_log(spec, text);
  spit(path, text.str());
  return path;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"metrics", "--log", "x", "--bogus"}).code == 1);
  CHECK(run({"select", "--metrics", "m.csv", "--strategy", "confusing"}).code == 1);
  CHECK(run({"select", "--metrics", "m.csv", "--fraction", "1.5"}).code == 1);
}

TEST_CASE("help on every subcommand exits 0") {
  const auto top = run({"--help"});
  CHECK(top.code == 0);
  for (const char* sub : {"validate", "metrics", "classify", "select", "rank", "train", "evaluate", "map", "curves",
                          "noise-bench", "report", "run-experiment", "make-corpus", "synth-log"}) {
    CAPTURE(sub);
    CHECK(top.out.find(sub) != std::string::npos);
    const auto r = run({sub, "--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("--") != std::string::npos);
  }
  CHECK(run({"--version"}).code == 0);
}

TEST_CASE("data errors exit 2") {
  testsupport::TempDir dir;
  CHECK(run({"metrics", "--log", dir.file("missing.jsonl")}).code == 2);
  spit(dir.file("bad.jsonl"), "{\"e\":0}\n");
  const auto r = run({"validate", "--log", dir.file("bad.jsonl")});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 1") != std::string::npos);
}

TEST_CASE("metrics, select, classify, rank and map") {
  testsupport::TempDir dir;
  const auto log = write_log(dir, 50, 4);
  CHECK(run({"validate", "--log", log}).code == 0);
  CHECK(run({"validate", "--log", log, "--streaming"}).code == 0);

  const auto metrics = dir.file("m.csv");
  REQUIRE(run({"metrics", "--log", log, "--out", metrics}).code == 0);
  const auto table = dynamics::read_csv_file(metrics);
  CHECK(table.rows.size() == 50);

  const auto to_stdout = run({"metrics", "--log", log});
  CHECK(to_stdout.code == 0);
  CHECK(to_stdout.out == slurp(metrics));

  const auto sel = dir.file("amb.txt");
  const auto s = run({"select", "--metrics", metrics, "--strategy", "ambiguous", "--fraction", "0.33", "--seed", "7",
                      "--out", sel});
  CHECK(s.code == 0);
  CHECK(carto::read_guid_list(sel).size() == 17);
  CHECK(carto::read_selection_manifest(sel + ".manifest.json").strategy == "ambiguous");

  const auto regions = run({"classify", "--metrics", metrics});
  CHECK(regions.code == 0);
  CHECK(regions.out.find("guid,region\n") != std::string::npos);

  const auto ranked = run({"rank", "--metrics", metrics, "--k", "5"});
  CHECK(ranked.code == 0);
  CHECK(ranked.out.find("\n5,") != std::string::npos);
  CHECK(run({"rank", "--metrics", metrics, "--k", "51"}).code == 1);

  CHECK(run({"map", "--metrics", metrics, "--out", dir.file("map.svg")}).code == 0);
  CHECK(slurp(dir.file("map.svg")).find("<svg") != std::string::npos);
}

TEST_CASE("train, evaluate, curves and config precedence") {
  testsupport::TempDir dir;
  synthetic::CorpusSpec corpus;
  corpus.train = 200;
  corpus.validation = 40;
  corpus.test = 40;
  corpus.ood = 20;
  REQUIRE(run({"make-corpus", "--out", dir.file("c.jsonl"), "--train", "200", "--validation", "40", "--test", "40",
               "--ood", "20"})
              .code == 0);
  spit(dir.file("train.toml"), "epochs = 3\nbatch-size = 32\n");
  const auto t = run({"train", "--data", dir.file("c.jsonl"), "--config", dir.file("train.toml"), "--log-out",
                      dir.file("t.jsonl"), "--curves-out", dir.file("t.csv"), "--model-out", dir.file("model.json"),
                      "--feature-dim", "4096"});
  REQUIRE(t.code == 0);
  CHECK(t.out.find("3 epochs") != std::string::npos);

  const auto override = run({"train", "--data", dir.file("c.jsonl"), "--config", dir.file("train.toml"), "--epochs",
                             "2", "--log-out", dir.file("t2.jsonl"), "--feature-dim", "4096"});
  CHECK(override.out.find("2 epochs") != std::string::npos);

  const auto e = run({"evaluate", "--data", dir.file("c.jsonl"), "--model", dir.file("model.json"), "--split", "test",
                      "--split", "ood"});
  CHECK(e.code == 0);
  CHECK(e.out.find("test ") != std::string::npos);
  CHECK(e.out.find("ood ") != std::string::npos);

  CHECK(run({"curves", "--curves", dir.file("t.csv"), "--out", dir.file("c.svg")}).code == 0);
  CHECK(run({"metrics", "--log", dir.file("t.jsonl"), "--out", dir.file("m.csv")}).code == 0);

  const auto subset = dir.file("sub.txt");
  CHECK(run({"select", "--metrics", dir.file("m.csv"), "--strategy", "random", "--out", subset}).code == 0);
  CHECK(run({"train", "--data", dir.file("c.jsonl"), "--subset", subset, "--epochs", "1", "--log-out",
             dir.file("s.jsonl"), "--feature-dim", "4096"})
            .code == 0);
  CHECK(dynlog::read_log_file(dir.file("s.jsonl")).instances.size() == 66);

  CHECK(run({"train", "--data", dir.file("c.jsonl"), "--batch-size", "0", "--log-out", dir.file("x.jsonl")}).code ==
        1);
}

TEST_CASE("noise-bench and report") {
  testsupport::TempDir dir;
  const auto nb = run({"noise-bench", "--train-size", "400", "--epochs", "8", "--resamples", "200", "--out",
                       dir.file("nb.json")});
  CHECK(nb.code == 0);
  CHECK(nb.out.find("precision@k") != std::string::npos);
  CHECK(nb.out.find("permutation test") != std::string::npos);
  CHECK(slurp(dir.file("nb.json")).find("\"p_value\"") != std::string::npos);

  spit(dir.file("exp.json"),
       R"({"dataset":"medqa","runs":[)"
       R"({"label":"pretrained-baseline","run_id":"a","test_accuracy":0.3169,"ood_accuracy":0.2542},)"
       R"({"label":"full","run_id":"b","test_accuracy":0.3607,"ood_accuracy":0.3050}]})");
  const auto rep = run({"report", "--manifest", dir.file("exp.json")});
  CHECK(rep.code == 0);
  CHECK(rep.out.find("| 100% train | **36.07** | **30.50** |") != std::string::npos);
  spit(dir.file("empty.json"), R"({"dataset":"x","runs":[]})");
  CHECK(run({"report", "--manifest", dir.file("empty.json")}).code == 2);
}

TEST_CASE("the installed binary maps exit codes") {
  CHECK(run_exe("--help") == 0);
  CHECK(run_exe("metrics --help") == 0);
  CHECK(run_exe("no-such-command") == 1);
  CHECK(run_exe("metrics --log /nonexistent/run.jsonl") == 2);
}
