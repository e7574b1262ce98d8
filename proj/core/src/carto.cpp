#include "cartograph/carto.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "cartograph/error.hpp"
#include "cartograph/provenance.hpp"
#include "cartograph/rng.hpp"

namespace cartograph::carto {

using dynamics::DynamicsMetrics;
using dynamics::MetricsTable;

namespace {

bool more_ambiguous(const DynamicsMetrics& a, const DynamicsMetrics& b) {
  if (a.variability != b.variability) return a.variability > b.variability;
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return a.guid < b.guid;
}

bool easier(const DynamicsMetrics& a, const DynamicsMetrics& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.variability != b.variability) return a.variability < b.variability;
  return a.guid < b.guid;
}

bool harder(const DynamicsMetrics& a, const DynamicsMetrics& b) {
  if (a.confidence != b.confidence) return a.confidence < b.confidence;
  if (a.variability != b.variability) return a.variability < b.variability;
  return a.guid < b.guid;
}

template <typename Less>
std::vector<std::size_t> order_rows(const MetricsTable& table, Less less) {
  std::vector<std::size_t> idx(table.rows.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return less(table.rows[a], table.rows[b]); });
  return idx;
}

void require_rows(const MetricsTable& table) {
  if (table.rows.empty()) throw DataError("metrics table is empty");
}

void check_fraction(double f, const char* what) {
  if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument(std::string(what) + " fraction must lie in [0, 1]");
}

}  // namespace

std::string_view to_string(Region region) {
  switch (region) {
    case Region::easy_to_learn: return "easy_to_learn";
    case Region::hard_to_learn: return "hard_to_learn";
    case Region::ambiguous: return "ambiguous";
    case Region::other: return "other";
  }
  return "other";
}

std::size_t RegionAssignment::count(Region region) const {
  return static_cast<std::size_t>(std::count(regions.begin(), regions.end(), region));
}

Region RegionAssignment::region_of(std::string_view guid) const {
  for (std::size_t i = 0; i < guids.size(); ++i) {
    if (guids[i] == guid) return regions[i];
  }
  return Region::other;
}

std::size_t selection_count(double fraction, std::size_t n) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("fraction must lie in [0, 1]");
  if (fraction == 0.0 || n == 0) return 0;
  const auto c = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
  return std::clamp<std::size_t>(c, 1, n);
}

RegionAssignment classify(const MetricsTable& table, const RegionFractions& fractions) {
  check_fraction(fractions.easy, "easy");
  check_fraction(fractions.hard, "hard");
  check_fraction(fractions.ambiguous, "ambiguous");
  if (fractions.easy + fractions.hard + fractions.ambiguous > 1.0 + 1e-12) {
    throw std::invalid_argument("region fractions sum to more than 1");
  }
  require_rows(table);

  const std::size_t n = table.rows.size();
  RegionAssignment out;
  out.fractions = fractions;
  out.guids.reserve(n);
  for (const auto& r : table.rows) out.guids.push_back(r.guid);
  out.regions.assign(n, Region::other);

  auto take = [&](const std::vector<std::size_t>& order, std::size_t want, Region region) {
    for (std::size_t i : order) {
      if (want == 0) break;
      if (out.regions[i] != Region::other) continue;
      out.regions[i] = region;
      --want;
    }
  };
  take(order_rows(table, more_ambiguous), selection_count(fractions.ambiguous, n), Region::ambiguous);
  take(order_rows(table, easier), selection_count(fractions.easy, n), Region::easy_to_learn);
  take(order_rows(table, harder), selection_count(fractions.hard, n), Region::hard_to_learn);
  return out;
}

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::random: return "random";
    case Strategy::ambiguous: return "ambiguous";
    case Strategy::easy: return "easy";
    case Strategy::hard: return "hard";
  }
  return "random";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "random") return Strategy::random;
  if (name == "ambiguous") return Strategy::ambiguous;
  if (name == "easy") return Strategy::easy;
  if (name == "hard") return Strategy::hard;
  throw std::invalid_argument("unknown selection strategy \"" + std::string(name) + "\"");
}

std::vector<std::string> select(const MetricsTable& table, const SelectionSpec& spec) {
  if (!(spec.fraction > 0.0 && spec.fraction <= 1.0)) {
    throw std::invalid_argument("selection fraction must lie in (0, 1]");
  }
  require_rows(table);
  const std::size_t n = table.rows.size();
  const std::size_t k = selection_count(spec.fraction, n);

  std::vector<std::size_t> chosen;
  switch (spec.strategy) {
    case Strategy::random: {
      auto by_guid = order_rows(table, [](const DynamicsMetrics& a, const DynamicsMetrics& b) { return a.guid < b.guid; });
      Rng rng(spec.seed);
      for (std::size_t pos : sample_without_replacement(n, k, rng)) chosen.push_back(by_guid[pos]);
      break;
    }
    case Strategy::ambiguous: chosen = order_rows(table, more_ambiguous); break;
    case Strategy::easy: chosen = order_rows(table, easier); break;
    case Strategy::hard: chosen = order_rows(table, harder); break;
  }
  chosen.resize(k);

  std::vector<std::string> guids;
  guids.reserve(k);
  for (std::size_t i : chosen) guids.push_back(table.rows[i].guid);
  std::sort(guids.begin(), guids.end());
  return guids;
}

std::vector<std::string> rank_hard_to_learn(const MetricsTable& table, std::size_t k) {
  if (k < 1 || k > table.rows.size()) {
    throw std::out_of_range("k must lie in [1, " + std::to_string(table.rows.size()) + "]");
  }
  auto order = order_rows(table, harder);
  std::vector<std::string> guids;
  guids.reserve(k);
  for (std::size_t i = 0; i < k; ++i) guids.push_back(table.rows[order[i]].guid);
  return guids;
}

void write_selection(const std::string& path, const std::vector<std::string>& guids,
                     const SelectionManifest& manifest) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    for (const auto& g : guids) out << g << '\n';
    if (!out) throw DataError("write failed: " + path);
  }
  nlohmann::json j = {
      {"strategy", manifest.strategy},
      {"fraction", manifest.fraction},
      {"seed", manifest.seed},
      {"count", manifest.count},
      {"source_run_id", manifest.source_run_id},
      {"tool", manifest.tool.empty() ? std::string(tool_version()) : manifest.tool},
  };
  std::ofstream out(path + ".manifest.json", std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path + ".manifest.json");
  out << j.dump(2) << '\n';
}

std::vector<std::string> read_guid_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open guid list: " + path);
  std::vector<std::string> guids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) guids.push_back(line);
  }
  return guids;
}

SelectionManifest read_selection_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open selection manifest: " + path);
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (!j.is_object()) throw DataError("malformed selection manifest: " + path);
  try {
    SelectionManifest m;
    m.strategy = j.at("strategy").get<std::string>();
    m.fraction = j.at("fraction").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.count = j.at("count").get<std::size_t>();
    m.source_run_id = j.value("source_run_id", "");
    m.tool = j.value("tool", "");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed selection manifest " + path + ": " + e.what());
  }
}

}  // namespace cartograph::carto
