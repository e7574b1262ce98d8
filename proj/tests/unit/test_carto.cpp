#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "cartograph/carto.hpp"
#include "cartograph/error.hpp"
#include "cartograph/rng.hpp"
#include "cartograph/synthetic.hpp"
#include "support.hpp"

using namespace cartograph;
using namespace cartograph::carto;
using dynamics::MetricsTable;

namespace {

MetricsTable fixture_table() {
  MetricsTable t;
  t.meta.run_id = "fixture";
  const std::vector<std::tuple<std::string, double, double>> rows{
      {"a", 0.90, 0.05}, {"b", 0.10, 0.05}, {"c", 0.50, 0.40}, {"d", 0.55, 0.40},
      {"e", 0.95, 0.02}, {"f", 0.20, 0.10}, {"g", 0.60, 0.30}, {"h", 0.05, 0.01},
      {"i", 0.90, 0.05}, {"j", 0.45, 0.35}, {"k", 0.10, 0.02}, {"l", 0.70, 0.20},
  };
  for (const auto& [g, c, v] : rows) t.rows.push_back({g, c, v, 0.5, 4});
  return t;
}

using Guids = std::vector<std::string>;

}  // namespace

TEST_CASE("selection_count rounding") {
  CHECK(selection_count(0.33, 100) == 33);
  CHECK(selection_count(0.33, 182822) == 60331);
  CHECK(selection_count(0.01, 10) == 1);
  CHECK(selection_count(0.5, 1) == 1);
  CHECK(selection_count(0.0, 10) == 0);
  CHECK(selection_count(1.0, 7) == 7);
  CHECK(selection_count(0.25, 10) == 3);
}

TEST_CASE("strategies on the fixture table") {
  const auto t = fixture_table();
  CHECK(select(t, {Strategy::ambiguous, 0.33, 0}) == Guids{"c", "d", "g", "j"});
  CHECK(select(t, {Strategy::easy, 0.33, 0}) == Guids{"a", "e", "i", "l"});
  CHECK(select(t, {Strategy::hard, 0.33, 0}) == Guids{"b", "f", "h", "k"});
  CHECK(select(t, {Strategy::random, 0.33, 7}) == Guids{"d", "g", "i", "k"});
  CHECK(rank_hard_to_learn(t, 3) == Guids{"h", "k", "b"});
}

TEST_CASE("classify assigns ambiguous first") {
  const auto t = fixture_table();
  const auto regions = classify(t);
  CHECK(regions.count(Region::ambiguous) == 4);
  CHECK(regions.count(Region::easy_to_learn) == 4);
  CHECK(regions.count(Region::hard_to_learn) == 4);
  CHECK(regions.count(Region::other) == 0);
  for (const char* g : {"c", "d", "g", "j"}) CHECK(regions.region_of(g) == Region::ambiguous);
  for (const char* g : {"a", "e", "i", "l"}) CHECK(regions.region_of(g) == Region::easy_to_learn);
  for (const char* g : {"b", "f", "h", "k"}) CHECK(regions.region_of(g) == Region::hard_to_learn);
  CHECK(regions.region_of("zz") == Region::other);

  const auto partial = classify(t, {0.1, 0.1, 0.1});
  CHECK(partial.count(Region::other) == 12 - 3);

  CHECK_THROWS_AS(classify(t, {0.5, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(classify(t, {-0.1, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(classify(MetricsTable{}), DataError);
}

TEST_CASE("selection sizes follow count(f, N)") {
  for (std::size_t n : {1u, 10u, 100u, 1000u}) {
    const auto t = synthetic::random_metrics(n, 5, n);
    for (double f : {0.01, 0.33, 0.5, 1.0}) {
      for (auto s : {Strategy::random, Strategy::ambiguous, Strategy::easy, Strategy::hard}) {
        const auto picked = select(t, {s, f, 3});
        CHECK(picked.size() == selection_count(f, n));
        CHECK(std::is_sorted(picked.begin(), picked.end()));
        CHECK(std::set<std::string>(picked.begin(), picked.end()).size() == picked.size());
      }
    }
  }
}

TEST_CASE("ambiguous selection dominates by brute force") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = synthetic::random_metrics(200, 10, seed);
    const auto picked = select(t, {Strategy::ambiguous, 0.33, 0});
    const std::set<std::string> in(picked.begin(), picked.end());
    double min_in = 1.0, max_out = 0.0;
    for (const auto& r : t.rows) {
      if (in.count(r.guid)) {
        min_in = std::min(min_in, r.variability);
      } else {
        max_out = std::max(max_out, r.variability);
      }
    }
    CHECK(min_in >= max_out);
  }
}

TEST_CASE("random selection is reproducible and seed dependent") {
  const auto t = synthetic::random_metrics(1000, 5, 1);
  const auto a = select(t, {Strategy::random, 0.33, 99});
  const auto b = select(t, {Strategy::random, 0.33, 99});
  const auto c = select(t, {Strategy::random, 0.33, 100});
  CHECK(a == b);
  CHECK(a != c);

  auto shuffled = t;
  Rng rng(5);
  rng.shuffle(std::span<dynamics::DynamicsMetrics>(shuffled.rows));
  CHECK(select(shuffled, {Strategy::random, 0.33, 99}) == a);
}

TEST_CASE("selection argument checks") {
  const auto t = fixture_table();
  CHECK_THROWS_AS(select(t, {Strategy::random, 0.0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(select(t, {Strategy::random, 1.5, 0}), std::invalid_argument);
  CHECK_THROWS_AS(rank_hard_to_learn(t, 0), std::out_of_range);
  CHECK_THROWS_AS(rank_hard_to_learn(t, 13), std::out_of_range);
  CHECK(parse_strategy("ambiguous") == Strategy::ambiguous);
  CHECK_THROWS_AS(parse_strategy("confusing"), std::invalid_argument);
}

TEST_CASE("selection files round trip") {
  testsupport::TempDir dir;
  const auto path = dir.file("sel.txt");
  const Guids guids{"a", "b", "c"};
  write_selection(path, guids, {"ambiguous", 0.33, 7, 3, "run-1", "cartograph test"});
  CHECK(read_guid_list(path) == guids);
  const auto m = read_selection_manifest(path + ".manifest.json");
  CHECK(m.strategy == "ambiguous");
  CHECK(m.fraction == 0.33);
  CHECK(m.seed == 7);
  CHECK(m.count == 3);
  CHECK(m.source_run_id == "run-1");
}
