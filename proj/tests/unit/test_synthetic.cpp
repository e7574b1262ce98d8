#include <doctest.h>

#include <sstream>

#include "cartograph/synthetic.hpp"

using namespace cartograph;
using namespace cartograph::synthetic;

TEST_CASE("gaussian clusters") {
  GaussianSpec spec;
  spec.num_classes = 3;
  spec.dim = 5;
  spec.train = 30;
  spec.validation = 6;
  spec.test = 9;
  spec.seed = 1;
  const auto ds = gaussian_clusters(spec);
  CHECK(ds.size(trainer::Split::train) == 30);
  CHECK(ds.size(trainer::Split::validation) == 6);
  CHECK(ds.size(trainer::Split::test) == 9);
  CHECK(ds.examples.front().guid == "train-000000");
  for (const auto& ex : ds.examples) {
    CHECK(ex.gold >= 0);
    CHECK(ex.gold < 3);
    CHECK(ex.features.size() <= 5);
  }
  const auto again = gaussian_clusters(spec);
  CHECK(again.examples.size() == ds.examples.size());
  CHECK(again.examples[7].features == ds.examples[7].features);

  spec.num_classes = 6;
  CHECK_THROWS_AS(gaussian_clusters(spec), std::invalid_argument);
}

TEST_CASE("random metrics stay in range") {
  const auto t = random_metrics(200, 4, 9);
  CHECK(t.rows.size() == 200);
  CHECK(t.rows.front().guid == "r0000000");
  for (const auto& r : t.rows) {
    CHECK(r.confidence >= 0.0);
    CHECK(r.confidence <= 1.0);
    CHECK(r.variability <= 0.5);
    CHECK(r.epochs_used == 4);
  }
}

TEST_CASE("topic corpus") {
  CorpusSpec spec;
  spec.train = 40;
  spec.validation = 8;
  spec.test = 8;
  spec.ood = 8;
  std::ostringstream a, b;
  write_topic_corpus(spec, a);
  write_topic_corpus(spec, b);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  trainer::DatasetOptions options;
  options.name = "topics";
  const auto ds = trainer::load_dataset(in, options);
  CHECK(ds.num_classes == 4);
  CHECK(ds.size(trainer::Split::train) == 40);
  CHECK(ds.size(trainer::Split::ood) == 8);
}
