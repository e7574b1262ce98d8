#include <doctest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cartograph/error.hpp"
#include "cartograph/noisebench.hpp"
#include "cartograph/synthetic.hpp"

using namespace cartograph;
using namespace cartograph::noisebench;

namespace {

dynamics::MetricsTable ten_rows() {
  dynamics::MetricsTable t;
  t.meta.run_id = "nb";
  for (int i = 0; i < 10; ++i) t.rows.push_back({"g" + std::to_string(i), 0.1 * i + 0.05, 0.01, 1.0, 5});
  return t;
}

}  // namespace

TEST_CASE("inject_noise flips the requested count to a different class") {
  synthetic::GaussianSpec spec;
  spec.num_classes = 4;
  spec.train = 200;
  spec.seed = 1;
  const auto ds = synthetic::gaussian_clusters(spec);
  const auto noisy = inject_noise(ds, {0.1, 42});
  CHECK(noisy.flipped.size() == 20);
  CHECK(std::is_sorted(noisy.flipped.begin(), noisy.flipped.end()));
  const std::set<std::string> flipped(noisy.flipped.begin(), noisy.flipped.end());
  std::size_t changed = 0;
  for (std::size_t i = 0; i < ds.examples.size(); ++i) {
    const auto& before = ds.examples[i];
    const auto& after = noisy.dataset.examples[i];
    if (before.gold != after.gold) {
      ++changed;
      CHECK(flipped.count(before.guid) == 1);
      CHECK(before.split == trainer::Split::train);
      CHECK(after.gold >= 0);
      CHECK(after.gold < 4);
    }
  }
  CHECK(changed == 20);

  CHECK(inject_noise(ds, {0.1, 42}).flipped == noisy.flipped);
  CHECK(inject_noise(ds, {0.0, 42}).flipped.empty());
  CHECK(inject_noise(ds, {1.0, 42}).flipped.size() == 200);
  CHECK_THROWS_AS(inject_noise(ds, {1.5, 42}), std::invalid_argument);
}

TEST_CASE("flip targets are uniform over the other classes") {
  synthetic::GaussianSpec spec;
  spec.num_classes = 4;
  spec.train = 8000;
  spec.validation = 1;
  spec.test = 0;
  spec.seed = 2;
  const auto ds = synthetic::gaussian_clusters(spec);
  const auto noisy = inject_noise(ds, {1.0, 3});
  std::vector<int> offsets(4, 0);
  for (std::size_t i = 0; i < ds.examples.size(); ++i) {
    if (ds.examples[i].split != trainer::Split::train) continue;
    offsets[(noisy.dataset.examples[i].gold - ds.examples[i].gold + 4) % 4]++;
  }
  CHECK(offsets[0] == 0);
  for (int d = 1; d < 4; ++d) CHECK(std::abs(offsets[d] - 8000 / 3.0) < 200);
}

TEST_CASE("eval_detection on a hand fixture") {
  const auto t = ten_rows();
  const auto r = eval_detection(t, {"g0", "g1", "g9"}, 3);
  CHECK(r.hits == 2);
  CHECK(r.precision_at_k == doctest::Approx(2.0 / 3.0));
  CHECK(r.recall_at_k == doctest::Approx(2.0 / 3.0));
  CHECK(r.base_rate == doctest::Approx(0.3));
  CHECK(r.lift == doctest::Approx((2.0 / 3.0) / 0.3));
  CHECK(r.mean_confidence_flipped == doctest::Approx((0.05 + 0.15 + 0.95) / 3));
  CHECK(r.warnings.empty());

  const auto none = eval_detection(t, {}, 2);
  CHECK(none.lift == 0.0);
  CHECK(std::isnan(none.mean_confidence_flipped));
  CHECK(!none.warnings.empty());

  CHECK_THROWS_AS(eval_detection(t, {"g0"}, 0), std::out_of_range);
  CHECK_THROWS_AS(eval_detection(t, {"g0"}, 11), std::out_of_range);
  CHECK_THROWS_AS(eval_detection(t, {"nope"}, 2), DataError);
}

TEST_CASE("permutation test") {
  const auto t = ten_rows();
  const auto strong = permutation_test(t, {"g0", "g1"}, 999, 1);
  CHECK(strong.observed_difference < 0.0);
  // Only 1 of the 45 labellings is as extreme, so p is close to 1/45.
  CHECK(strong.p_value < 0.06);
  const auto weak = permutation_test(t, {"g8", "g9"}, 999, 1);
  CHECK(weak.p_value > 0.9);
  CHECK(permutation_test(t, {"g0", "g1"}, 999, 1).p_value == strong.p_value);
  CHECK_THROWS_AS(permutation_test(t, {}, 10, 1), std::invalid_argument);
}

TEST_CASE("run_benchmark end to end on a small fixture") {
  synthetic::GaussianSpec spec;
  spec.num_classes = 3;
  spec.dim = 10;
  spec.train = 300;
  spec.validation = 60;
  spec.test = 0;
  spec.seed = 4;
  const auto ds = synthetic::gaussian_clusters(spec);
  trainer::TrainConfig cfg;
  cfg.epochs = 10;
  const auto result = run_benchmark(ds, cfg, {0.1, 5});
  CHECK(result.flipped.size() == 30);
  CHECK(result.report.k == 30);
  CHECK(result.metrics.rows.size() == 300);
  CHECK(result.report.lift >= 5.0);

  const auto j = nlohmann::json::parse(to_json(result.report, {0.1, 5}, 0));
  CHECK(j["n_flipped"] == 30);
  CHECK(j["noise_seed"] == 5);
  CHECK(format_table(result.report).find("precision@k") != std::string::npos);
}
