#pragma once

// cartograph-dynlog v1: the interchange format between training loops and the
// analysis side of the toolkit.
//
// The file is UTF-8 line-delimited JSON with LF newlines and no BOM.
//
//   line 1   {"cartograph_dynlog":1,"run_id":"...","dataset_name":"...",
//             "num_classes":C,"planned_epochs":E,"num_train_instances":N,
//             "created_at":"..."}
//   line 2+  {"e":0,"guid":"q1","gold":2,"p_gold":0.25,"pred":2}
//
// One record per (epoch, training instance), written after a frozen inference
// pass over the training split at the end of each epoch. Epochs are 0-based:
// the model state at the end of the first epoch is recorded as e=0. p_gold is
// the probability the model assigns to the gold class and pred is the argmax
// class (ties broken by the lowest index). p_gold is written as the shortest
// decimal that reads back to the identical double. Unknown keys are ignored on
// read and never written.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cartograph::dynlog {

inline constexpr int kFormatVersion = 1;

// Stored in Observation::pred when the trainer did not supply an argmax.
inline constexpr int kNoPrediction = -1;

struct RunMeta {
  std::string run_id;
  std::string dataset_name;
  int num_classes = 0;
  int planned_epochs = 0;
  std::int64_t num_train_instances = 0;  // 0 = unknown
  std::string created_at;

  bool operator==(const RunMeta&) const = default;
};

// Throws std::invalid_argument unless C >= 2, E >= 1, run_id nonempty, N >= 0.
void check_meta(const RunMeta& meta);

struct SnapshotRecord {
  int epoch = 0;
  std::string guid;
  int gold = 0;
  double p_gold = 0.0;
  int pred = 0;
};

struct Observation {
  int epoch = 0;
  int gold = 0;
  int pred = kNoPrediction;
  double p_gold = 0.0;

  bool operator==(const Observation&) const = default;
};

struct Instance {
  std::string guid;
  int gold = 0;                     // gold of the first record seen
  std::vector<Observation> series;  // ascending epoch

  bool operator==(const Instance&) const = default;
};

// Instances keep the order of their first appearance in the file. A dense log
// has a record for every instance at every epoch 0..observed_epochs-1.
struct RunLog {
  RunMeta meta;
  std::vector<Instance> instances;
  int observed_epochs = 0;
  bool ragged = false;

  bool operator==(const RunLog&) const = default;
};

std::string format_header(const RunMeta& meta);
std::string format_record(const SnapshotRecord& record);

// Append-only writer for one run file.
class Writer {
 public:
  explicit Writer(std::ostream& sink) : sink_(&sink) {}

  // Validates meta and emits the header line. Throws std::logic_error if a
  // header was already written.
  void write_header(const RunMeta& meta);

  // Throws std::logic_error before the header, std::invalid_argument when the
  // record violates the header's class/epoch ranges or p_gold is outside
  // [0, 1], DataError when the sink fails.
  void append(const SnapshotRecord& record);

  // Records become visible to readers of the underlying file after flush().
  void flush();

  std::size_t records_written() const { return records_; }

 private:
  void put_line(const std::string& line);

  std::ostream* sink_;
  bool header_written_ = false;
  RunMeta meta_;
  std::size_t records_ = 0;
};

// Writes a whole RunLog (header then records, epoch-major). Observations with
// kNoPrediction are written without a "pred" key.
void write_log(const RunLog& log, std::ostream& sink);

struct ParseOptions {
  // Keep instances that are missing some epochs instead of failing; each
  // instance's series then covers only its observed epochs.
  bool allow_ragged = false;
};

// Reads a complete log. Throws ParseError (with line number) on a missing or
// duplicate header, malformed JSON, wrong field types or a duplicate
// (epoch, guid) record; throws DataError on a ragged grid unless
// allow_ragged. Value ranges (class indices, p_gold) are not enforced here;
// validate() reports them.
RunLog parse_log(std::istream& source, const ParseOptions& options = {});
RunLog read_log_file(const std::string& path, const ParseOptions& options = {});

enum class ViolationKind {
  header,              // meta invariants
  format,              // unparseable line (streaming mode only)
  bounds,              // p_gold, gold, pred or epoch out of range
  density,             // instance missing from an observed epoch
  duplicate,           // repeated (epoch, guid) (streaming mode cannot see these)
  gold_drift,          // gold differs between epochs of one instance
  instance_count,      // header N disagrees with the instances present
  missing_prediction,  // no pred recorded; correctness undefined
};

enum class Severity { error, warning };

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind = ViolationKind::header;
  Severity severity = Severity::error;
  std::size_t count = 0;
  std::string first_guid;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::size_t instances = 0;
  std::size_t records = 0;
  int observed_epochs = 0;

  // True when no error-severity violation is present.
  bool valid() const;
  const Violation* find(ViolationKind kind) const;
};

// Pure: never throws on data problems and never modifies the log.
ValidationReport validate(const RunLog& log);

// Single pass over a file checking header, line syntax and value bounds
// without materializing instances; memory use does not grow with N.
// Cross-record properties (density, duplicates, gold drift) are not checked.
ValidationReport validate_stream(std::istream& source);

}  // namespace cartograph::dynlog
