#include "cartograph/trainer.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "cartograph/error.hpp"
#include "cartograph/provenance.hpp"
#include "cartograph/rng.hpp"

namespace cartograph::trainer {

using nlohmann::json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
    case Split::ood: return "ood";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "validation" || name == "valid" || name == "dev") return Split::validation;
  if (name == "test") return Split::test;
  if (name == "ood") return Split::ood;
  throw std::invalid_argument("unknown split \"" + std::string(name) + "\"");
}

SparseVector featurize(std::string_view text, std::uint32_t dim) {
  if (dim < 2) throw std::invalid_argument("feature dimension must be >= 2");
  std::unordered_map<std::uint32_t, double> counts;
  std::uint64_t hash = 0;
  bool in_token = false;
  auto finish = [&] {
    if (in_token) counts[static_cast<std::uint32_t>(hash % dim)] += 1.0;
    in_token = false;
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    const bool word = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
    if (!word) {
      finish();
      continue;
    }
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    if (!in_token) {
      hash = 0xcbf29ce484222325ULL;
      in_token = true;
    }
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  finish();

  SparseVector v;
  v.reserve(counts.size());
  double norm2 = 0.0;
  for (const auto& [index, count] : counts) v.push_back({index, count});
  std::sort(v.begin(), v.end(), [](const Feature& a, const Feature& b) { return a.index < b.index; });
  for (const auto& f : v) norm2 += f.value * f.value;
  const double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
  for (auto& f : v) f.value *= inv;
  return v;
}

std::vector<std::size_t> Dataset::indices(Split split) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].split == split) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return examples[a].guid < examples[b].guid; });
  return idx;
}

std::size_t Dataset::size(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(examples.begin(), examples.end(), [&](const Example& e) { return e.split == split; }));
}

Dataset Dataset::with_train_subset(std::span<const std::string> train_guids) const {
  std::unordered_set<std::string> keep(train_guids.begin(), train_guids.end());
  Dataset out;
  out.name = name;
  out.num_classes = num_classes;
  out.feature_dim = feature_dim;
  std::size_t matched = 0;
  for (const auto& e : examples) {
    if (e.split != Split::train) {
      if (keep.count(e.guid) != 0) throw DataError("guid \"" + e.guid + "\" is not a train example");
      out.examples.push_back(e);
    } else if (keep.count(e.guid) != 0) {
      out.examples.push_back(e);
      ++matched;
    }
  }
  if (matched != keep.size()) throw DataError("subset names guids that are not in the dataset");
  return out;
}

namespace {

SparseVector parse_feature_list(const json& list, std::uint32_t dim, std::size_t line) {
  if (!list.is_array()) throw ParseError(line, "\"features\" must be an array of [index, value] pairs");
  SparseVector v;
  for (const auto& pair : list) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number()) {
      throw ParseError(line, "\"features\" must be an array of [index, value] pairs");
    }
    const auto index = pair[0].get<std::int64_t>();
    if (index < 0 || index >= static_cast<std::int64_t>(dim)) {
      throw ParseError(line, "feature index " + std::to_string(index) + " outside [0, " + std::to_string(dim) + ")");
    }
    v.push_back({static_cast<std::uint32_t>(index), pair[1].get<double>()});
  }
  std::stable_sort(v.begin(), v.end(), [](const Feature& a, const Feature& b) { return a.index < b.index; });
  SparseVector merged;
  for (const auto& f : v) {
    if (!merged.empty() && merged.back().index == f.index) {
      merged.back().value += f.value;
    } else {
      merged.push_back(f);
    }
  }
  return merged;
}

}  // namespace

Dataset load_dataset(std::istream& in, const DatasetOptions& options) {
  if (options.feature_dim < 2) throw std::invalid_argument("feature dimension must be >= 2");
  Dataset ds;
  ds.name = options.name;
  ds.feature_dim = options.feature_dim;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  int max_gold = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw ParseError(lineno, "malformed JSON object");
    Example ex;
    try {
      ex.guid = obj.at("guid").get<std::string>();
      ex.split = parse_split(obj.at("split").get<std::string>());
      if (!obj.at("gold").is_number_integer()) throw ParseError(lineno, "\"gold\" must be an integer");
      const auto gold = obj.at("gold").get<std::int64_t>();
      if (gold < 0 || gold > std::numeric_limits<int>::max()) throw ParseError(lineno, "\"gold\" out of range");
      ex.gold = static_cast<int>(gold);
    } catch (const json::exception& e) {
      throw ParseError(lineno, e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(lineno, e.what());
    }
    if (ex.guid.empty()) throw ParseError(lineno, "empty guid");
    if (auto it = obj.find("features"); it != obj.end()) {
      ex.features = parse_feature_list(*it, ds.feature_dim, lineno);
    } else if (auto t = obj.find("text"); t != obj.end() && t->is_string()) {
      ex.features = featurize(t->get_ref<const std::string&>(), ds.feature_dim);
    } else {
      throw ParseError(lineno, "example needs \"text\" or \"features\"");
    }
    if (!seen.insert(ex.guid).second) throw DataError("duplicate guid \"" + ex.guid + "\"");
    max_gold = std::max(max_gold, ex.gold);
    ds.examples.push_back(std::move(ex));
  }
  ds.num_classes = options.num_classes > 0 ? options.num_classes : std::max(2, max_gold + 1);
  if (max_gold >= ds.num_classes) {
    throw DataError("gold label " + std::to_string(max_gold) + " outside [0, " + std::to_string(ds.num_classes) + ")");
  }
  return ds;
}

Dataset load_dataset_file(const std::string& path, DatasetOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset: " + path);
  if (options.name.empty()) options.name = std::filesystem::path(path).stem().string();
  return load_dataset(in, options);
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  for (const auto& e : dataset.examples) {
    json features = json::array();
    for (const auto& f : e.features) features.push_back(json::array({f.index, f.value}));
    json obj = {{"guid", e.guid}, {"split", std::string(to_string(e.split))}, {"gold", e.gold}, {"features", features}};
    out << obj.dump() << '\n';
  }
  if (!out) throw DataError("dataset write failed");
}

void TrainConfig::check() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw std::invalid_argument("l2 must be >= 0");
  if (!(improvement_epsilon >= 0.0)) throw std::invalid_argument("improvement_epsilon must be >= 0");
}

ModelState ModelState::zeros(int num_classes, std::uint32_t feature_dim) {
  if (num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
  ModelState m;
  m.num_classes = num_classes;
  m.feature_dim = feature_dim;
  m.weights.assign(static_cast<std::size_t>(num_classes) * feature_dim, 0.0);
  m.bias.assign(static_cast<std::size_t>(num_classes), 0.0);
  return m;
}

std::uint64_t ModelState::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(num_classes));
  mix(feature_dim);
  for (double w : weights) mix(std::bit_cast<std::uint64_t>(w));
  for (double b : bias) mix(std::bit_cast<std::uint64_t>(b));
  return h;
}

namespace {

// Fills `probs` with softmax(W x + b) and returns log-sum-exp of the logits.
double softmax(const ModelState& model, const SparseVector& x, std::vector<double>& probs) {
  const int C = model.num_classes;
  probs.assign(static_cast<std::size_t>(C), 0.0);
  for (int c = 0; c < C; ++c) {
    double z = model.bias[c];
    const double* row = model.weights.data() + static_cast<std::size_t>(c) * model.feature_dim;
    for (const auto& f : x) z += row[f.index] * f.value;
    probs[c] = z;
  }
  const double zmax = *std::max_element(probs.begin(), probs.end());
  double sum = 0.0;
  for (auto& p : probs) {
    p = std::exp(p - zmax);
    sum += p;
  }
  for (auto& p : probs) p /= sum;
  return zmax + std::log(sum);
}

void check_dims(const ModelState& model, const SparseVector& x) {
  if (!x.empty() && x.back().index >= model.feature_dim) {
    throw std::invalid_argument("feature index " + std::to_string(x.back().index) + " exceeds model dimension " +
                                std::to_string(model.feature_dim));
  }
}

int argmax(const std::vector<double>& probs) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(probs.size()); ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return best;
}

// Cross-entropy of gold given logits summarized by (lse, z_gold).
double cross_entropy(const ModelState& model, const SparseVector& x, int gold, double lse) {
  double z = model.bias[gold];
  const double* row = model.weights.data() + static_cast<std::size_t>(gold) * model.feature_dim;
  for (const auto& f : x) z += row[f.index] * f.value;
  return lse - z;
}

double squared_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double w : v) s += w * w;
  return s;
}

// Sum over a batch of the unregularized cross-entropy gradient, kept dense
// but cleared through the list of touched features.
class BatchAccumulator {
 public:
  BatchAccumulator(int num_classes, std::uint32_t feature_dim)
      : classes_(num_classes),
        dim_(feature_dim),
        grad_(static_cast<std::size_t>(num_classes) * feature_dim, 0.0),
        bias_(static_cast<std::size_t>(num_classes), 0.0),
        marked_(feature_dim, 0) {}

  void add(const ModelState& model, const Example& ex) {
    check_dims(model, ex.features);
    const double lse = softmax(model, ex.features, probs_);
    loss_ += cross_entropy(model, ex.features, ex.gold, lse);
    for (const auto& f : ex.features) {
      if (!marked_[f.index]) {
        marked_[f.index] = 1;
        touched_.push_back(f.index);
      }
    }
    for (int c = 0; c < classes_; ++c) {
      const double r = probs_[c] - (c == ex.gold ? 1.0 : 0.0);
      bias_[c] += r;
      double* row = grad_.data() + static_cast<std::size_t>(c) * dim_;
      for (const auto& f : ex.features) row[f.index] += r * f.value;
    }
  }

  double loss_sum() const { return loss_; }

  // W <- (1 - lr*l2) W - (lr/B) g, b <- b - (lr/B) g_b, then resets.
  void apply(ModelState& model, double lr, double l2, std::size_t batch) {
    const double step = lr / static_cast<double>(batch);
    if (l2 > 0.0) {
      const double decay = 1.0 - lr * l2;
      for (double& w : model.weights) w *= decay;
    }
    for (int c = 0; c < classes_; ++c) {
      double* row = model.weights.data() + static_cast<std::size_t>(c) * dim_;
      double* g = grad_.data() + static_cast<std::size_t>(c) * dim_;
      for (std::uint32_t j : touched_) row[j] -= step * g[j];
      model.bias[c] -= step * bias_[c];
    }
    reset();
  }

  // Dense mean gradient including the L2 term; resets.
  Gradient take_mean(const ModelState& model, double l2, std::size_t batch) {
    Gradient g;
    const double inv = 1.0 / static_cast<double>(batch);
    g.weights.resize(grad_.size());
    for (std::size_t i = 0; i < grad_.size(); ++i) g.weights[i] = grad_[i] * inv + l2 * model.weights[i];
    g.bias.resize(bias_.size());
    for (std::size_t c = 0; c < bias_.size(); ++c) g.bias[c] = bias_[c] * inv;
    g.loss = loss_ * inv + 0.5 * l2 * squared_norm(model.weights);
    reset();
    return g;
  }

 private:
  void reset() {
    for (int c = 0; c < classes_; ++c) {
      double* g = grad_.data() + static_cast<std::size_t>(c) * dim_;
      for (std::uint32_t j : touched_) g[j] = 0.0;
    }
    for (std::uint32_t j : touched_) marked_[j] = 0;
    touched_.clear();
    std::fill(bias_.begin(), bias_.end(), 0.0);
    loss_ = 0.0;
  }

  int classes_;
  std::uint32_t dim_;
  std::vector<double> grad_;
  std::vector<double> bias_;
  std::vector<char> marked_;
  std::vector<std::uint32_t> touched_;
  std::vector<double> probs_;
  double loss_ = 0.0;
};

void check_compatible(const ModelState& model, const Dataset& dataset) {
  if (model.num_classes != dataset.num_classes || model.feature_dim != dataset.feature_dim) {
    throw std::invalid_argument("model dimensions (" + std::to_string(model.num_classes) + " x " +
                                std::to_string(model.feature_dim) + ") do not match dataset (" +
                                std::to_string(dataset.num_classes) + " x " + std::to_string(dataset.feature_dim) +
                                ")");
  }
}

}  // namespace

std::vector<double> predict_proba(const ModelState& model, const SparseVector& x) {
  check_dims(model, x);
  std::vector<double> probs;
  softmax(model, x, probs);
  return probs;
}

int predict(const ModelState& model, const SparseVector& x) { return argmax(predict_proba(model, x)); }

Gradient objective_gradient(const ModelState& model, const Dataset& dataset, std::span<const std::size_t> batch,
                            double l2) {
  check_compatible(model, dataset);
  if (batch.empty()) throw std::invalid_argument("empty batch");
  BatchAccumulator acc(model.num_classes, model.feature_dim);
  for (std::size_t i : batch) acc.add(model, dataset.examples.at(i));
  return acc.take_mean(model, l2, batch.size());
}

double objective(const ModelState& model, const Dataset& dataset, std::span<const std::size_t> batch, double l2) {
  check_compatible(model, dataset);
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::vector<double> probs;
  double loss = 0.0;
  for (std::size_t i : batch) {
    const auto& ex = dataset.examples.at(i);
    check_dims(model, ex.features);
    loss += cross_entropy(model, ex.features, ex.gold, softmax(model, ex.features, probs));
  }
  return loss / static_cast<double>(batch.size()) + 0.5 * l2 * squared_norm(model.weights);
}

SnapshotPass snapshot_pass(const ModelState& model, const Dataset& dataset, int epoch) {
  check_compatible(model, dataset);
  SnapshotPass pass;
  const auto train_idx = dataset.indices(Split::train);
  pass.records.reserve(train_idx.size());
  std::vector<double> probs;
  std::size_t hits = 0;
  double ce = 0.0;
  for (std::size_t i : train_idx) {
    const auto& ex = dataset.examples[i];
    check_dims(model, ex.features);
    const double lse = softmax(model, ex.features, probs);
    const int pred = argmax(probs);
    if (pred == ex.gold) ++hits;
    ce += cross_entropy(model, ex.features, ex.gold, lse);
    pass.records.push_back({epoch, ex.guid, ex.gold, probs[ex.gold], pred});
  }
  if (!train_idx.empty()) {
    pass.accuracy = static_cast<double>(hits) / static_cast<double>(train_idx.size());
    pass.mean_cross_entropy = ce / static_cast<double>(train_idx.size());
  }
  return pass;
}

TrainResult train(const Dataset& dataset, const TrainConfig& config, std::ostream* log_sink,
                  const RunIdentity& identity) {
  config.check();
  if (dataset.num_classes < 2) throw DataError("dataset needs at least 2 classes");
  auto order = dataset.indices(Split::train);
  if (order.empty()) throw DataError("train split is empty");
  if (dataset.size(Split::validation) == 0) throw DataError("validation split is empty");

  std::optional<dynlog::Writer> writer;
  if (log_sink != nullptr) {
    writer.emplace(*log_sink);
    dynlog::RunMeta meta;
    meta.run_id = identity.run_id;
    meta.dataset_name = dataset.name;
    meta.num_classes = dataset.num_classes;
    meta.planned_epochs = config.epochs;
    meta.num_train_instances = static_cast<std::int64_t>(order.size());
    meta.created_at = identity.created_at.empty() ? utc_timestamp_now() : identity.created_at;
    writer->write_header(meta);
  }

  TrainResult result;
  result.model = ModelState::zeros(dataset.num_classes, dataset.feature_dim);
  BatchAccumulator acc(dataset.num_classes, dataset.feature_dim);
  const auto batch_size = static_cast<std::size_t>(config.batch_size);
  double best_val = -std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(epoch)));
    std::vector<std::size_t> perm = order;
    rng.shuffle(std::span<std::size_t>(perm));

    for (std::size_t start = 0; start < perm.size(); start += batch_size) {
      const std::size_t end = std::min(perm.size(), start + batch_size);
      for (std::size_t k = start; k < end; ++k) acc.add(result.model, dataset.examples[perm[k]]);
      const double batch_loss = acc.loss_sum() / static_cast<double>(end - start);
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch + 1) + " (batch starting at " +
                            std::to_string(start) + "); learning rate " + format_double(config.learning_rate) +
                            " is likely too high");
      }
      acc.apply(result.model, config.learning_rate, config.l2, end - start);
    }
    result.model.epoch = epoch + 1;

    SnapshotPass pass = snapshot_pass(result.model, dataset, epoch);
    const double loss = pass.mean_cross_entropy + 0.5 * config.l2 * squared_norm(result.model.weights);
    if (!std::isfinite(loss)) {
      throw TrainingError("non-finite training loss after epoch " + std::to_string(epoch + 1) + "; learning rate " +
                          format_double(config.learning_rate) + " is likely too high");
    }
    if (writer) {
      for (const auto& r : pass.records) writer->append(r);
      writer->flush();
    }
    const double val = evaluate(result.model, dataset, Split::validation);
    result.curves.push_back({epoch + 1, pass.accuracy, val, loss});
    result.epochs_completed = epoch + 1;

    if (val > best_val + config.improvement_epsilon || epoch == 0) {
      best_val = val;
      result.best_epoch = epoch + 1;
      since_best = 0;
      if (config.keep_best) result.best_model = result.model;
    } else if (++since_best >= config.patience) {
      result.early_stopped = epoch + 1 < config.epochs;
      break;
    }
  }
  return result;
}

double evaluate(const ModelState& model, const Dataset& dataset, Split split) {
  check_compatible(model, dataset);
  std::size_t total = 0;
  std::size_t hits = 0;
  for (const auto& ex : dataset.examples) {
    if (ex.split != split) continue;
    ++total;
    if (predict(model, ex.features) == ex.gold) ++hits;
  }
  if (total == 0) throw DataError("split \"" + std::string(to_string(split)) + "\" is empty");
  return static_cast<double>(hits) / static_cast<double>(total);
}

void save_model(const ModelState& model, std::ostream& out, const std::string& run_id, std::uint64_t seed) {
  json weights = json::array();
  for (int c = 0; c < model.num_classes; ++c) {
    for (std::uint32_t j = 0; j < model.feature_dim; ++j) {
      const double w = model.weight(c, j);
      if (w != 0.0 || std::signbit(w)) weights.push_back(json::array({c, j, w}));
    }
  }
  json j = {
      {"format", "cartograph-model"}, {"version", 1},         {"tool", std::string(tool_version())},
      {"run_id", run_id},             {"seed", seed},         {"num_classes", model.num_classes},
      {"feature_dim", model.feature_dim}, {"epoch", model.epoch}, {"bias", model.bias},
      {"weights", weights},
  };
  out << j.dump() << '\n';
  if (!out) throw DataError("model write failed");
}

ModelState load_model(std::istream& in) {
  json j = json::parse(in, nullptr, false);
  if (!j.is_object() || j.value("format", "") != "cartograph-model") throw DataError("not a cartograph model file");
  try {
    ModelState m = ModelState::zeros(j.at("num_classes").get<int>(), j.at("feature_dim").get<std::uint32_t>());
    m.epoch = j.at("epoch").get<int>();
    auto bias = j.at("bias").get<std::vector<double>>();
    if (bias.size() != m.bias.size()) throw DataError("model bias has wrong length");
    m.bias = std::move(bias);
    for (const auto& t : j.at("weights")) {
      const int c = t.at(0).get<int>();
      const auto f = t.at(1).get<std::uint32_t>();
      if (c < 0 || c >= m.num_classes || f >= m.feature_dim) throw DataError("model weight index out of range");
      m.weights[static_cast<std::size_t>(c) * m.feature_dim + f] = t.at(2).get<double>();
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void write_curves_csv(const CurveLog& curves, std::ostream& out, const std::string& run_id, std::uint64_t seed) {
  json prov = {{"artifact", "cartograph-curves"}, {"tool", std::string(tool_version())}, {"run_id", run_id},
               {"seed", seed}};
  out << "# " << prov.dump() << "\nepoch,train_acc,val_acc,mean_loss\n";
  for (const auto& p : curves) {
    out << p.epoch << ',' << format_double(p.train_accuracy) << ',' << format_double(p.validation_accuracy) << ','
        << format_double(p.mean_train_loss) << '\n';
  }
  if (!out) throw DataError("curve CSV write failed");
}

CurveLog read_curves_csv(std::istream& in) {
  CurveLog curves;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      if (line != "epoch,train_acc,val_acc,mean_loss") throw ParseError(lineno, "expected curve CSV header");
      have_header = true;
      continue;
    }
    CurvePoint p;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    if (!(row >> p.epoch >> c1 >> p.train_accuracy >> c2 >> p.validation_accuracy >> c3 >> p.mean_train_loss) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw ParseError(lineno, "malformed curve row");
    }
    curves.push_back(p);
  }
  if (!have_header) throw ParseError(std::max<std::size_t>(lineno, 1), "missing curve CSV header");
  return curves;
}

}  // namespace cartograph::trainer
