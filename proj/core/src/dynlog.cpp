#include "cartograph/dynlog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "cartograph/error.hpp"
#include "cartograph/provenance.hpp"

namespace cartograph::dynlog {

using nlohmann::json;

namespace {

constexpr std::string_view kHeaderKey = "cartograph_dynlog";

void append_json_string(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          static constexpr char kHex[] = "0123456789abcdef";
          out += "\\u00";
          out.push_back(kHex[c >> 4]);
          out.push_back(kHex[c & 0xf]);
        } else {
          out.push_back(ch);
        }
    }
  }
  out.push_back('"');
}

bool in_unit_interval(double p) { return p >= 0.0 && p <= 1.0; }

const json* field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::int64_t require_int(const json& obj, const char* key, std::size_t line) {
  const json* v = field(obj, key);
  if (v == nullptr) throw ParseError(line, std::string("missing field \"") + key + "\"");
  if (!v->is_number_integer()) throw ParseError(line, std::string("field \"") + key + "\" must be an integer");
  return v->get<std::int64_t>();
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
  const json* v = field(obj, key);
  if (v == nullptr) throw ParseError(line, std::string("missing field \"") + key + "\"");
  if (!v->is_string()) throw ParseError(line, std::string("field \"") + key + "\" must be a string");
  return v->get<std::string>();
}

int narrow_int(std::int64_t v, const char* key, std::size_t line) {
  if (v < -2147483648LL || v > 2147483647LL) {
    throw ParseError(line, std::string("field \"") + key + "\" out of integer range");
  }
  return static_cast<int>(v);
}

json parse_object(const std::string& text, std::size_t line) {
  json obj = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded()) throw ParseError(line, "malformed JSON");
  if (!obj.is_object()) throw ParseError(line, "expected a JSON object");
  return obj;
}

RunMeta parse_header(const json& obj, std::size_t line) {
  const json* version = field(obj, kHeaderKey.data());
  if (version == nullptr) throw ParseError(line, "missing cartograph_dynlog header");
  if (!version->is_number_integer() || version->get<std::int64_t>() != kFormatVersion) {
    throw ParseError(line, "unsupported cartograph_dynlog version");
  }
  RunMeta meta;
  meta.run_id = require_string(obj, "run_id", line);
  meta.dataset_name = require_string(obj, "dataset_name", line);
  meta.num_classes = narrow_int(require_int(obj, "num_classes", line), "num_classes", line);
  meta.planned_epochs = narrow_int(require_int(obj, "planned_epochs", line), "planned_epochs", line);
  if (field(obj, "num_train_instances") != nullptr) {
    meta.num_train_instances = require_int(obj, "num_train_instances", line);
  }
  if (field(obj, "created_at") != nullptr) meta.created_at = require_string(obj, "created_at", line);
  return meta;
}

struct ParsedRecord {
  int epoch;
  std::string guid;
  int gold;
  double p_gold;
  int pred;
};

ParsedRecord parse_record(const json& obj, std::size_t line) {
  if (field(obj, kHeaderKey.data()) != nullptr) throw ParseError(line, "duplicate header");
  ParsedRecord r;
  r.epoch = narrow_int(require_int(obj, "e", line), "e", line);
  if (r.epoch < 0) throw ParseError(line, "negative epoch");
  r.guid = require_string(obj, "guid", line);
  if (r.guid.empty()) throw ParseError(line, "empty guid");
  r.gold = narrow_int(require_int(obj, "gold", line), "gold", line);
  const json* p = field(obj, "p_gold");
  if (p == nullptr) throw ParseError(line, "missing field \"p_gold\"");
  if (!p->is_number()) throw ParseError(line, "field \"p_gold\" must be a number");
  r.p_gold = p->get<double>();
  r.pred = kNoPrediction;
  if (const json* pred = field(obj, "pred"); pred != nullptr && !pred->is_null()) {
    r.pred = narrow_int(require_int(obj, "pred", line), "pred", line);
  }
  return r;
}

// Line reader that strips a trailing CR and rejects a UTF-8 BOM.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(&in) {}

  bool next(std::string& line) {
    if (!std::getline(*in_, line)) return false;
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number_ == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      throw ParseError(1, "byte order mark is not allowed");
    }
    return true;
  }

  std::size_t number() const { return number_; }

 private:
  std::istream* in_;
  std::size_t number_ = 0;
};

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t'; });
}

// First epoch in [0, expected) absent from a sorted, duplicate-free series.
int first_missing_epoch(const std::vector<Observation>& series, int expected) {
  int want = 0;
  for (const auto& o : series) {
    if (o.epoch != want) return want;
    ++want;
  }
  return want < expected ? want : -1;
}

void note(Violation& v, const std::string& guid, std::string detail) {
  if (v.count++ == 0) {
    v.first_guid = guid;
    v.detail = std::move(detail);
  }
}

}  // namespace

void check_meta(const RunMeta& meta) {
  if (meta.run_id.empty()) throw std::invalid_argument("run_id must be nonempty");
  if (meta.num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
  if (meta.planned_epochs < 1) throw std::invalid_argument("planned_epochs must be >= 1");
  if (meta.num_train_instances < 0) throw std::invalid_argument("num_train_instances must be >= 0");
}

std::string format_header(const RunMeta& meta) {
  std::string out = "{\"cartograph_dynlog\":1,\"run_id\":";
  append_json_string(out, meta.run_id);
  out += ",\"dataset_name\":";
  append_json_string(out, meta.dataset_name);
  out += ",\"num_classes\":" + std::to_string(meta.num_classes);
  out += ",\"planned_epochs\":" + std::to_string(meta.planned_epochs);
  out += ",\"num_train_instances\":" + std::to_string(meta.num_train_instances);
  out += ",\"created_at\":";
  append_json_string(out, meta.created_at);
  out += '}';
  return out;
}

std::string format_record(const SnapshotRecord& record) {
  std::string out = "{\"e\":" + std::to_string(record.epoch) + ",\"guid\":";
  append_json_string(out, record.guid);
  out += ",\"gold\":" + std::to_string(record.gold);
  out += ",\"p_gold\":" + format_double(record.p_gold);
  if (record.pred != kNoPrediction) out += ",\"pred\":" + std::to_string(record.pred);
  out += '}';
  return out;
}

void Writer::write_header(const RunMeta& meta) {
  if (header_written_) throw std::logic_error("dynlog header already written");
  check_meta(meta);
  put_line(format_header(meta));
  meta_ = meta;
  header_written_ = true;
}

void Writer::append(const SnapshotRecord& record) {
  if (!header_written_) throw std::logic_error("dynlog header must be written before records");
  if (record.guid.empty()) throw std::invalid_argument("guid must be nonempty");
  if (record.epoch < 0 || record.epoch >= meta_.planned_epochs) {
    throw std::invalid_argument("epoch " + std::to_string(record.epoch) + " outside [0, " +
                                std::to_string(meta_.planned_epochs) + ")");
  }
  if (record.gold < 0 || record.gold >= meta_.num_classes) {
    throw std::invalid_argument("gold class " + std::to_string(record.gold) + " out of range");
  }
  if (record.pred < 0 || record.pred >= meta_.num_classes) {
    throw std::invalid_argument("predicted class " + std::to_string(record.pred) + " out of range");
  }
  if (!in_unit_interval(record.p_gold)) {
    throw std::invalid_argument("p_gold " + format_double(record.p_gold) + " outside [0, 1]");
  }
  put_line(format_record(record));
  ++records_;
}

void Writer::flush() {
  sink_->flush();
  if (!*sink_) throw DataError("dynlog: flush failed");
}

void Writer::put_line(const std::string& line) {
  sink_->write(line.data(), static_cast<std::streamsize>(line.size()));
  sink_->put('\n');
  if (!*sink_) throw DataError("dynlog: write failed");
}

void write_log(const RunLog& log, std::ostream& sink) {
  sink << format_header(log.meta) << '\n';
  int max_epoch = -1;
  for (const auto& inst : log.instances) {
    for (const auto& o : inst.series) max_epoch = std::max(max_epoch, o.epoch);
  }
  // Epoch-major, instances in log order, mirroring how a trainer emits them.
  std::vector<std::size_t> cursor(log.instances.size(), 0);
  for (int e = 0; e <= max_epoch; ++e) {
    for (std::size_t i = 0; i < log.instances.size(); ++i) {
      const auto& inst = log.instances[i];
      while (cursor[i] < inst.series.size() && inst.series[cursor[i]].epoch == e) {
        const auto& o = inst.series[cursor[i]++];
        sink << format_record({o.epoch, inst.guid, o.gold, o.p_gold, o.pred}) << '\n';
      }
    }
  }
  if (!sink) throw DataError("dynlog: write failed");
}

RunLog parse_log(std::istream& source, const ParseOptions& options) {
  LineReader reader(source);
  std::string line;
  RunLog log;

  bool have_header = false;
  while (reader.next(line)) {
    if (blank(line)) continue;
    log.meta = parse_header(parse_object(line, reader.number()), reader.number());
    have_header = true;
    break;
  }
  if (!have_header) throw ParseError(std::max<std::size_t>(reader.number(), 1), "missing cartograph_dynlog header");

  std::unordered_map<std::string, std::size_t> index;
  std::vector<char> needs_sort;
  int max_epoch = -1;
  while (reader.next(line)) {
    if (blank(line)) continue;
    const std::size_t lineno = reader.number();
    ParsedRecord r = parse_record(parse_object(line, lineno), lineno);
    auto [it, inserted] = index.try_emplace(r.guid, log.instances.size());
    if (inserted) {
      log.instances.push_back(Instance{r.guid, r.gold, {}});
      needs_sort.push_back(0);
    }
    const std::size_t i = it->second;
    auto& series = log.instances[i].series;
    if (!series.empty() && series.back().epoch >= r.epoch) {
      if (series.back().epoch == r.epoch) {
        throw ParseError(lineno, "duplicate record for guid \"" + r.guid + "\" at epoch " + std::to_string(r.epoch));
      }
      needs_sort[i] = 1;
    }
    series.push_back(Observation{r.epoch, r.gold, r.pred, r.p_gold});
    max_epoch = std::max(max_epoch, r.epoch);
  }

  log.observed_epochs = max_epoch + 1;
  for (std::size_t i = 0; i < log.instances.size(); ++i) {
    auto& inst = log.instances[i];
    if (needs_sort[i]) {
      std::stable_sort(inst.series.begin(), inst.series.end(),
                       [](const Observation& a, const Observation& b) { return a.epoch < b.epoch; });
      auto dup = std::adjacent_find(inst.series.begin(), inst.series.end(),
                                    [](const Observation& a, const Observation& b) { return a.epoch == b.epoch; });
      if (dup != inst.series.end()) {
        throw DataError("duplicate record for guid \"" + inst.guid + "\" at epoch " + std::to_string(dup->epoch));
      }
    }
    const int missing = first_missing_epoch(inst.series, log.observed_epochs);
    if (missing >= 0) {
      if (!options.allow_ragged) {
        throw DataError("ragged grid: instance \"" + inst.guid + "\" has no record for epoch " +
                        std::to_string(missing));
      }
      log.ragged = true;
    }
  }
  return log;
}

RunLog read_log_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dynamics log: " + path);
  return parse_log(in, options);
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::header: return "header";
    case ViolationKind::format: return "format";
    case ViolationKind::bounds: return "bounds";
    case ViolationKind::density: return "density";
    case ViolationKind::duplicate: return "duplicate";
    case ViolationKind::gold_drift: return "gold_drift";
    case ViolationKind::instance_count: return "instance_count";
    case ViolationKind::missing_prediction: return "missing_prediction";
  }
  return "unknown";
}

bool ValidationReport::valid() const {
  return std::none_of(violations.begin(), violations.end(),
                      [](const Violation& v) { return v.severity == Severity::error; });
}

const Violation* ValidationReport::find(ViolationKind kind) const {
  for (const auto& v : violations) {
    if (v.kind == kind) return &v;
  }
  return nullptr;
}

namespace {

// Describes the first out-of-range field of an observation, or "" if none.
std::string bounds_problem(const RunMeta& meta, int epoch, int gold, int pred, double p_gold) {
  if (!in_unit_interval(p_gold)) return "p_gold " + format_double(p_gold) + " outside [0, 1]";
  if (meta.num_classes >= 1 && (gold < 0 || gold >= meta.num_classes)) {
    return "gold " + std::to_string(gold) + " outside [0, " + std::to_string(meta.num_classes) + ")";
  }
  if (pred != kNoPrediction && meta.num_classes >= 1 && (pred < 0 || pred >= meta.num_classes)) {
    return "pred " + std::to_string(pred) + " outside [0, " + std::to_string(meta.num_classes) + ")";
  }
  if (epoch < 0 || (meta.planned_epochs >= 1 && epoch >= meta.planned_epochs)) {
    return "epoch " + std::to_string(epoch) + " outside [0, " + std::to_string(meta.planned_epochs) + ")";
  }
  return {};
}

Violation fresh(ViolationKind kind, Severity severity = Severity::error) {
  Violation v;
  v.kind = kind;
  v.severity = severity;
  return v;
}

void collect(ValidationReport& report, Violation&& v) {
  if (v.count > 0) report.violations.push_back(std::move(v));
}

void check_header(ValidationReport& report, const RunMeta& meta) {
  try {
    check_meta(meta);
  } catch (const std::invalid_argument& e) {
    report.violations.push_back(Violation{ViolationKind::header, Severity::error, 1, "", e.what()});
  }
}

}  // namespace

ValidationReport validate(const RunLog& log) {
  ValidationReport report;
  report.instances = log.instances.size();
  check_header(report, log.meta);

  Violation bounds = fresh(ViolationKind::bounds);
  Violation density = fresh(ViolationKind::density);
  Violation duplicate = fresh(ViolationKind::duplicate);
  Violation drift = fresh(ViolationKind::gold_drift);
  Violation missing_pred = fresh(ViolationKind::missing_prediction, Severity::warning);

  int max_epoch = -1;
  for (const auto& inst : log.instances) {
    for (const auto& o : inst.series) max_epoch = std::max(max_epoch, o.epoch);
  }
  report.observed_epochs = max_epoch + 1;

  for (const auto& inst : log.instances) {
    report.records += inst.series.size();
    bool sorted_unique = true;
    for (std::size_t k = 0; k < inst.series.size(); ++k) {
      const auto& o = inst.series[k];
      if (auto problem = bounds_problem(log.meta, o.epoch, o.gold, o.pred, o.p_gold); !problem.empty()) {
        note(bounds, inst.guid, "guid \"" + inst.guid + "\" epoch " + std::to_string(o.epoch) + ": " + problem);
      }
      if (o.pred == kNoPrediction) {
        note(missing_pred, inst.guid,
             "guid \"" + inst.guid + "\" has no pred at epoch " + std::to_string(o.epoch) +
                 "; correctness is undefined for this run");
      }
      if (k > 0 && inst.series[k - 1].epoch >= o.epoch) sorted_unique = false;
    }
    if (!sorted_unique) {
      std::vector<int> epochs;
      for (const auto& o : inst.series) epochs.push_back(o.epoch);
      std::sort(epochs.begin(), epochs.end());
      if (auto d = std::adjacent_find(epochs.begin(), epochs.end()); d != epochs.end()) {
        note(duplicate, inst.guid, "guid \"" + inst.guid + "\" has two records at epoch " + std::to_string(*d));
      }
      epochs.erase(std::unique(epochs.begin(), epochs.end()), epochs.end());
      for (int e = 0; e < report.observed_epochs; ++e) {
        if (e >= static_cast<int>(epochs.size()) || epochs[e] != e) {
          note(density, inst.guid, "instance \"" + inst.guid + "\" has no record for epoch " + std::to_string(e));
          break;
        }
      }
    } else if (int missing = first_missing_epoch(inst.series, report.observed_epochs); missing >= 0) {
      note(density, inst.guid, "instance \"" + inst.guid + "\" has no record for epoch " + std::to_string(missing));
    }
    for (const auto& o : inst.series) {
      if (o.gold != inst.series.front().gold) {
        note(drift, inst.guid,
             "gold for \"" + inst.guid + "\" differs between epochs " + std::to_string(inst.series.front().epoch) +
                 " and " + std::to_string(o.epoch));
        break;
      }
    }
  }

  collect(report, std::move(bounds));
  collect(report, std::move(density));
  collect(report, std::move(duplicate));
  collect(report, std::move(drift));
  if (log.meta.num_train_instances > 0 &&
      static_cast<std::size_t>(log.meta.num_train_instances) != log.instances.size()) {
    report.violations.push_back(Violation{
        ViolationKind::instance_count, Severity::error, 1, "",
        "header declares " + std::to_string(log.meta.num_train_instances) + " instances, log has " +
            std::to_string(log.instances.size())});
  }
  collect(report, std::move(missing_pred));
  return report;
}

ValidationReport validate_stream(std::istream& source) {
  ValidationReport report;
  LineReader reader(source);
  std::string line;
  RunMeta meta;
  bool have_header = false;

  try {
    while (reader.next(line)) {
      if (blank(line)) continue;
      meta = parse_header(parse_object(line, reader.number()), reader.number());
      have_header = true;
      break;
    }
  } catch (const ParseError& e) {
    report.violations.push_back(Violation{ViolationKind::header, Severity::error, 1, "", e.what()});
    return report;
  }
  if (!have_header) {
    report.violations.push_back(
        Violation{ViolationKind::header, Severity::error, 1, "", "missing cartograph_dynlog header"});
    return report;
  }
  check_header(report, meta);

  Violation format = fresh(ViolationKind::format);
  Violation bounds = fresh(ViolationKind::bounds);
  Violation missing_pred = fresh(ViolationKind::missing_prediction, Severity::warning);
  int max_epoch = -1;
  for (;;) {
    try {
      if (!reader.next(line)) break;
    } catch (const ParseError& e) {
      note(format, "", e.what());
      continue;
    }
    if (blank(line)) continue;
    try {
      ParsedRecord r = parse_record(parse_object(line, reader.number()), reader.number());
      ++report.records;
      max_epoch = std::max(max_epoch, r.epoch);
      if (auto problem = bounds_problem(meta, r.epoch, r.gold, r.pred, r.p_gold); !problem.empty()) {
        note(bounds, r.guid, "line " + std::to_string(reader.number()) + ": " + problem);
      }
      if (r.pred == kNoPrediction) {
        note(missing_pred, r.guid, "line " + std::to_string(reader.number()) + ": no pred; correctness is undefined");
      }
    } catch (const ParseError& e) {
      note(format, "", e.what());
    }
  }
  report.observed_epochs = max_epoch + 1;
  collect(report, std::move(format));
  collect(report, std::move(bounds));
  collect(report, std::move(missing_pred));
  return report;
}

}  // namespace cartograph::dynlog
