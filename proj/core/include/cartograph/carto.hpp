#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cartograph/dynamics.hpp"

namespace cartograph::carto {

enum class Region { easy_to_learn, hard_to_learn, ambiguous, other };

std::string_view to_string(Region region);

// Region sizes as fractions of the table; rank-based, no absolute thresholds.
struct RegionFractions {
  double easy = 0.33;
  double hard = 0.33;
  double ambiguous = 0.33;
};

// regions[i] belongs to guids[i]; guids follow the table's row order.
struct RegionAssignment {
  std::vector<std::string> guids;
  std::vector<Region> regions;
  RegionFractions fractions;

  std::size_t count(Region region) const;
  Region region_of(std::string_view guid) const;  // Region::other if absent
};

// Number of instances a fraction f of n selects: max(1, floor(f*n + 0.5)),
// and 0 when f == 0.
std::size_t selection_count(double fraction, std::size_t n);

// Assigns `ambiguous` first (highest variability; ties to higher confidence,
// then guid), then `easy` from the remainder (highest confidence; ties to
// lower variability, then guid), then `hard` from what is left (lowest
// confidence; ties to lower variability, then guid). A region never takes
// more than the instances still unassigned. Throws std::invalid_argument on a
// negative fraction or a sum above 1, DataError on an empty table.
RegionAssignment classify(const dynamics::MetricsTable& table, const RegionFractions& fractions = {});

enum class Strategy { random, ambiguous, easy, hard };

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view name);  // throws std::invalid_argument

struct SelectionSpec {
  Strategy strategy = Strategy::ambiguous;
  double fraction = 0.33;
  std::uint64_t seed = 0;
};

// selection_count(fraction, N) guids, returned sorted by guid. `random` draws
// a uniform sample without replacement from cartograph-rng v1 seeded with
// spec.seed over the guid-sorted rows; the other strategies use the
// classify orderings.
std::vector<std::string> select(const dynamics::MetricsTable& table, const SelectionSpec& spec);

// The k lowest-confidence guids (ties to lower variability, then guid): the
// queue of likely mislabels. Throws std::out_of_range unless 1 <= k <= N.
std::vector<std::string> rank_hard_to_learn(const dynamics::MetricsTable& table, std::size_t k);

// Provenance written next to a selection's guid list.
struct SelectionManifest {
  std::string strategy;
  double fraction = 0.0;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::string source_run_id;
  std::string tool;
};

// Writes one guid per line to `path` and the manifest as JSON to
// `path + ".manifest.json"`.
void write_selection(const std::string& path, const std::vector<std::string>& guids,
                     const SelectionManifest& manifest);
std::vector<std::string> read_guid_list(const std::string& path);
SelectionManifest read_selection_manifest(const std::string& path);

}  // namespace cartograph::carto
