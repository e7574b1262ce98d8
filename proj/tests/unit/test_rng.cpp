#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "cartograph/rng.hpp"

using cartograph::Rng;

TEST_CASE("engine is the standard mt19937_64") {
  std::mt19937_64 reference;
  reference.discard(9999);
  CHECK(reference() == 9981545732273789042ULL);

  Rng rng(42);
  CHECK(rng.next() == 13930160852258120406ULL);
  CHECK(rng.next() == 11788048577503494824ULL);
  CHECK(rng.next() == 13874630024467741450ULL);
}

TEST_CASE("bounded draws match the reference sequence") {
  Rng rng(42);
  const std::vector<std::uint64_t> expected{6, 4, 0, 2, 1, 8, 6, 4};
  for (auto want : expected) CHECK(rng.below(10) == want);
  CHECK_THROWS_AS(rng.below(0), std::invalid_argument);
}

TEST_CASE("uniform doubles match the reference sequence") {
  Rng rng(42);
  CHECK(rng.uniform() == 0.755155532954539);
  CHECK(rng.uniform() == 0.6390313938546974);
  CHECK(rng.uniform() == 0.7521452007480266);
}

TEST_CASE("uniform stays in [0, 1) and below() stays under its bound") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.below(7) < 7u);
  }
  CHECK(rng.below(1) == 0u);
}

TEST_CASE("normal draws have unit moments") {
  Rng rng(11);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("mix_seed is splitmix64 over (seed, stream)") {
  CHECK(cartograph::mix_seed(1, 0) == 10451216379200822465ULL);
  CHECK(cartograph::mix_seed(0, 5) == 6038094601263162090ULL);
  CHECK(cartograph::mix_seed(1, 0) != cartograph::mix_seed(1, 1));
}

TEST_CASE("sample_without_replacement") {
  Rng rng(7);
  CHECK(cartograph::sample_without_replacement(10, 4, rng) == std::vector<std::size_t>{5, 7, 8, 0});

  Rng other(1);
  auto all = cartograph::sample_without_replacement(50, 50, other);
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);

  Rng again(1);
  CHECK(cartograph::sample_without_replacement(5, 0, again).empty());
  CHECK_THROWS_AS(cartograph::sample_without_replacement(3, 4, again), std::invalid_argument);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> a(20), b(20);
  for (int i = 0; i < 20; ++i) a[i] = b[i] = i;
  Rng r1(5), r2(5);
  r1.shuffle(std::span<int>(a));
  r2.shuffle(std::span<int>(b));
  CHECK(a == b);
  std::set<int> seen(a.begin(), a.end());
  CHECK(seen.size() == 20);
}
