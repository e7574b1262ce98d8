#include "cartograph/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "cartograph/error.hpp"
#include "cartograph/provenance.hpp"

namespace cartograph::dynamics {

namespace {

constexpr std::string_view kCsvHeader = "guid,confidence,variability,correctness,epochs_used";

double sum_ascending(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

DynamicsMetrics summarize(const dynlog::Instance& inst, std::vector<double>& probs, std::vector<int>& preds) {
  probs.clear();
  preds.clear();
  for (const auto& o : inst.series) {
    probs.push_back(o.p_gold);
    preds.push_back(o.pred);
  }
  DynamicsMetrics m;
  m.guid = inst.guid;
  m.confidence = confidence(probs);
  m.variability = variability(probs);
  m.correctness = correctness(preds, inst.gold);
  m.epochs_used = static_cast<int>(probs.size());
  return m;
}

}  // namespace

double confidence(std::span<const double> p_gold) {
  if (p_gold.empty()) throw std::invalid_argument("confidence: empty series");
  return sum_ascending(p_gold) / static_cast<double>(p_gold.size());
}

double variability(std::span<const double> p_gold) {
  if (p_gold.empty()) throw std::invalid_argument("variability: empty series");
  if (std::all_of(p_gold.begin(), p_gold.end(), [&](double p) { return p == p_gold.front(); })) return 0.0;
  const double mean = confidence(p_gold);
  double ss = 0.0;
  for (double p : p_gold) ss += (p - mean) * (p - mean);
  return std::sqrt(ss / static_cast<double>(p_gold.size()));
}

double correctness(std::span<const int> preds, int gold) {
  if (preds.empty()) throw std::invalid_argument("correctness: empty series");
  std::size_t hits = 0;
  for (int p : preds) {
    if (p == dynlog::kNoPrediction) return std::numeric_limits<double>::quiet_NaN();
    if (p == gold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

MetricsTable compute_all(const dynlog::RunLog& log, const ComputeOptions& options) {
  int max_epoch = -1;
  for (const auto& inst : log.instances) {
    if (inst.series.empty()) throw DataError("instance \"" + inst.guid + "\" has no records");
    for (const auto& o : inst.series) max_epoch = std::max(max_epoch, o.epoch);
    for (const auto& o : inst.series) {
      if (o.gold != inst.gold) throw DataError("gold drift for instance \"" + inst.guid + "\"");
    }
  }
  if (!log.instances.empty() && max_epoch < 0) throw DataError("log has no epochs");
  if (!options.allow_ragged) {
    for (const auto& inst : log.instances) {
      if (static_cast<int>(inst.series.size()) != max_epoch + 1) {
        throw DataError("ragged grid: instance \"" + inst.guid + "\" has " + std::to_string(inst.series.size()) +
                        " of " + std::to_string(max_epoch + 1) + " epochs (use allow_ragged)");
      }
    }
  }

  MetricsTable table;
  table.meta = log.meta;
  table.rows.resize(log.instances.size());

  const std::size_t n = log.instances.size();
  unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 4096)));
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> probs;
    std::vector<int> preds;
    for (std::size_t i = begin; i < end; ++i) table.rows[i] = summarize(log.instances[i], probs, preds);
  };
  if (threads <= 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      pool.emplace_back(work, begin, std::min(n, begin + chunk));
    }
  }

  std::sort(table.rows.begin(), table.rows.end(),
            [](const DynamicsMetrics& a, const DynamicsMetrics& b) { return a.guid < b.guid; });
  return table;
}

void write_csv(const MetricsTable& table, std::ostream& out) {
  nlohmann::json prov = {
      {"artifact", "cartograph-metrics"},
      {"tool", std::string(tool_version())},
      {"run_id", table.meta.run_id},
      {"dataset_name", table.meta.dataset_name},
      {"num_classes", table.meta.num_classes},
      {"planned_epochs", table.meta.planned_epochs},
      {"num_train_instances", table.meta.num_train_instances},
      {"created_at", table.meta.created_at},
  };
  out << "# " << prov.dump() << '\n' << kCsvHeader << '\n';
  for (const auto& r : table.rows) {
    if (r.guid.find_first_of(",\"\n\r") != std::string::npos) {
      throw DataError("guid \"" + r.guid + "\" cannot be written to CSV unquoted");
    }
    out << r.guid << ',' << format_significant(r.confidence, 9) << ',' << format_significant(r.variability, 9) << ','
        << format_significant(r.correctness, 9) << ',' << r.epochs_used << '\n';
  }
  if (!out) throw DataError("metrics CSV: write failed");
}

void write_csv_file(const MetricsTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  write_csv(table, out);
}

namespace {

double parse_real(std::string_view text, std::size_t line) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, "invalid number \"" + std::string(text) + "\"");
  }
  return v;
}

}  // namespace

MetricsTable read_csv(std::istream& in) {
  MetricsTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto prov = nlohmann::json::parse(line.substr(1), nullptr, false);
      if (prov.is_object()) {
        table.meta.run_id = prov.value("run_id", "");
        table.meta.dataset_name = prov.value("dataset_name", "");
        table.meta.num_classes = prov.value("num_classes", 0);
        table.meta.planned_epochs = prov.value("planned_epochs", 0);
        table.meta.num_train_instances = prov.value("num_train_instances", std::int64_t{0});
        table.meta.created_at = prov.value("created_at", "");
      }
      continue;
    }
    if (!have_header) {
      if (line != kCsvHeader) throw ParseError(lineno, "expected header \"" + std::string(kCsvHeader) + "\"");
      have_header = true;
      continue;
    }
    std::vector<std::string_view> cells;
    std::string_view rest = line;
    for (;;) {
      auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != 5) throw ParseError(lineno, "expected 5 columns, found " + std::to_string(cells.size()));
    DynamicsMetrics m;
    m.guid = std::string(cells[0]);
    if (m.guid.empty()) throw ParseError(lineno, "empty guid");
    m.confidence = parse_real(cells[1], lineno);
    m.variability = parse_real(cells[2], lineno);
    m.correctness = parse_real(cells[3], lineno);
    auto [ptr, ec] = std::from_chars(cells[4].data(), cells[4].data() + cells[4].size(), m.epochs_used);
    if (ec != std::errc() || ptr != cells[4].data() + cells[4].size()) {
      throw ParseError(lineno, "invalid epochs_used");
    }
    table.rows.push_back(std::move(m));
  }
  if (!have_header) throw ParseError(std::max<std::size_t>(lineno, 1), "missing metrics CSV header");
  std::sort(table.rows.begin(), table.rows.end(),
            [](const DynamicsMetrics& a, const DynamicsMetrics& b) { return a.guid < b.guid; });
  auto dup = std::adjacent_find(table.rows.begin(), table.rows.end(),
                                [](const DynamicsMetrics& a, const DynamicsMetrics& b) { return a.guid == b.guid; });
  if (dup != table.rows.end()) throw DataError("duplicate guid in metrics CSV: " + dup->guid);
  return table;
}

MetricsTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open metrics CSV: " + path);
  return read_csv(in);
}

}  // namespace cartograph::dynamics
