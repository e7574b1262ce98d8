#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace cartograph {

// cartograph-rng v1.
//
// Every seeded decision in the toolkit (random subsets, shuffles, noise
// injection, map subsampling, synthetic fixtures) draws from this generator so
// results are identical across platforms and standard libraries:
//
//   engine   std::mt19937_64, whose output sequence is fixed by the C++ standard
//   below(n) rejection sampling on the raw 64-bit output (arc4random_uniform
//            style): discard r < (2^64 - n) mod n, return r mod n
//   uniform  top 53 bits of one draw scaled by 2^-53, in [0, 1)
//   normal   Box-Muller on two uniform draws, no cached second variate
//
// std::uniform_int_distribution and friends are implementation-defined and are
// never used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  double uniform();

  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from (seed, stream) with splitmix64 so
// that, e.g., per-epoch shuffles do not depend on how many draws earlier
// epochs consumed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// k distinct indices from [0, n) in draw order (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace cartograph
