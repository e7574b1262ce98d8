#include "cartograph/synthetic.hpp"

#include <array>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cartograph/rng.hpp"

namespace cartograph::synthetic {

namespace {

std::string numbered(char prefix, std::size_t i) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%c%07zu", prefix, i);
  return buf.data();
}

int gold_of(std::uint64_t seed, std::size_t instance, int classes) {
  return static_cast<int>(mix_seed(seed ^ 0x676f6c64ULL, instance) % static_cast<std::uint64_t>(classes));
}

void check_log_spec(const RandomLogSpec& spec) {
  if (spec.num_classes < 2 || spec.epochs < 1) throw std::invalid_argument("random log needs C >= 2 and E >= 1");
}

// Visits records epoch-major; each epoch draws from its own stream.
template <typename Visit>
void generate_log(const RandomLogSpec& spec, Visit&& visit) {
  dynlog::SnapshotRecord rec;
  for (int e = 0; e < spec.epochs; ++e) {
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(e)));
    rec.epoch = e;
    for (std::size_t i = 0; i < spec.instances; ++i) {
      rec.guid = numbered('i', i);
      rec.gold = gold_of(spec.seed, i, spec.num_classes);
      rec.p_gold = rng.uniform();
      rec.pred = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.num_classes)));
      visit(i, rec);
    }
  }
}

dynlog::RunMeta meta_for(const RandomLogSpec& spec) {
  dynlog::RunMeta meta;
  meta.run_id = spec.run_id;
  meta.dataset_name = "synthetic";
  meta.num_classes = spec.num_classes;
  meta.planned_epochs = spec.epochs;
  meta.num_train_instances = static_cast<std::int64_t>(spec.instances);
  meta.created_at = "1970-01-01T00:00:00Z";
  return meta;
}

}  // namespace

trainer::Dataset gaussian_clusters(const GaussianSpec& spec) {
  if (spec.num_classes < 2 || static_cast<std::uint32_t>(spec.num_classes) > spec.dim) {
    throw std::invalid_argument("gaussian_clusters needs 2 <= num_classes <= dim");
  }
  trainer::Dataset ds;
  ds.name = "gaussian";
  ds.num_classes = spec.num_classes;
  ds.feature_dim = spec.dim;
  Rng rng(spec.seed);
  auto emit = [&](trainer::Split split, std::size_t count, const char* prefix) {
    for (std::size_t i = 0; i < count; ++i) {
      trainer::Example ex;
      std::array<char, 48> buf{};
      std::snprintf(buf.data(), buf.size(), "%s-%06zu", prefix, i);
      ex.guid = buf.data();
      ex.split = split;
      const int cls = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.num_classes)));
      ex.features.reserve(spec.dim);
      for (std::uint32_t j = 0; j < spec.dim; ++j) {
        const double mean = static_cast<int>(j) == cls ? spec.separation : 0.0;
        ex.features.push_back({j, mean + spec.noise * rng.normal()});
      }
      ex.gold = cls;
      if (split == trainer::Split::validation && spec.random_validation_labels) {
        ex.gold = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.num_classes)));
      }
      ds.examples.push_back(std::move(ex));
    }
  };
  emit(trainer::Split::train, spec.train, "train");
  emit(trainer::Split::validation, spec.validation, "val");
  emit(trainer::Split::test, spec.test, "test");
  return ds;
}

dynlog::RunLog random_log(const RandomLogSpec& spec) {
  check_log_spec(spec);
  dynlog::RunLog log;
  log.meta = meta_for(spec);
  log.observed_epochs = spec.epochs;
  log.instances.resize(spec.instances);
  generate_log(spec, [&](std::size_t i, const dynlog::SnapshotRecord& r) {
    auto& inst = log.instances[i];
    if (inst.series.empty()) {
      inst.guid = r.guid;
      inst.gold = r.gold;
      inst.series.reserve(static_cast<std::size_t>(spec.epochs));
    }
    inst.series.push_back({r.epoch, r.gold, r.pred, r.p_gold});
  });
  return log;
}

void write_random_log(const RandomLogSpec& spec, std::ostream& out) {
  check_log_spec(spec);
  dynlog::Writer writer(out);
  writer.write_header(meta_for(spec));
  generate_log(spec, [&](std::size_t, const dynlog::SnapshotRecord& r) { writer.append(r); });
  writer.flush();
}

dynamics::MetricsTable random_metrics(std::size_t rows, int epochs, std::uint64_t seed) {
  dynamics::MetricsTable table;
  table.meta.run_id = "synthetic-metrics";
  table.meta.dataset_name = "synthetic";
  table.meta.num_classes = 2;
  table.meta.planned_epochs = epochs;
  table.meta.num_train_instances = static_cast<std::int64_t>(rows);
  table.rows.reserve(rows);
  Rng rng(seed);
  for (std::size_t i = 0; i < rows; ++i) {
    dynamics::DynamicsMetrics m;
    m.guid = numbered('r', i);
    m.confidence = rng.uniform();
    m.variability = 0.5 * rng.uniform();
    m.correctness = static_cast<double>(rng.below(static_cast<std::uint64_t>(epochs) + 1)) / epochs;
    m.epochs_used = epochs;
    table.rows.push_back(std::move(m));
  }
  return table;
}

namespace {

using WordList = std::vector<const char*>;

const std::array<WordList, 4>& topic_words() {
  static const std::array<WordList, 4> topics = {{
      {"angina", "arrhythmia", "atrial", "fibrillation", "myocardial", "infarction", "troponin", "stent",
       "coronary", "systolic", "diastolic", "murmur", "valve", "aortic", "mitral", "ventricular", "tachycardia",
       "bradycardia", "ecg", "pericarditis", "cardiomyopathy", "hypertension", "statin", "anticoagulant",
       "palpitations", "syncope", "ejection", "catheterization", "bypass", "endocarditis"},
      {"seizure", "epilepsy", "migraine", "stroke", "hemiparesis", "aphasia", "neuropathy", "sclerosis",
       "parkinson", "tremor", "dementia", "cerebral", "meningeal", "lumbar", "puncture", "reflexes", "ataxia",
       "neuron", "myelin", "spinal", "cranial", "nerve", "vertigo", "paresthesia", "gait", "cognitive",
       "electroencephalogram", "thrombolysis", "dopamine", "convulsion"},
      {"fever", "sepsis", "antibiotic", "bacterial", "viral", "culture", "pneumonia", "tuberculosis", "hiv",
       "hepatitis", "malaria", "vaccine", "pathogen", "abscess", "cellulitis", "meningitis", "streptococcus",
       "staphylococcus", "antiviral", "fungal", "parasite", "leukocytosis", "rash", "incubation", "contagious",
       "quarantine", "amoxicillin", "resistance", "infection", "serology"},
      {"diabetes", "insulin", "glucose", "thyroid", "hypothyroidism", "hyperthyroidism", "cortisol", "adrenal",
       "pituitary", "hba1c", "ketoacidosis", "metformin", "obesity", "hormone", "levothyroxine", "goiter",
       "cushing", "addison", "prolactin", "testosterone", "estrogen", "parathyroid", "calcium", "osteoporosis",
       "polyuria", "polydipsia", "glycemic", "endocrine", "gland", "acromegaly"},
  }};
  return topics;
}

const WordList& filler_words() {
  static const WordList words = {
      "patient", "year", "old", "presents", "with", "history", "of", "the", "a", "and", "to", "emergency",
      "department", "examination", "shows", "which", "following", "most", "likely", "diagnosis", "next", "best",
      "step", "management", "is", "man", "woman", "reports", "days", "weeks", "months", "pain", "blood",
      "pressure", "temperature", "heart", "rate", "laboratory", "studies", "normal", "elevated", "decreased",
      "physical", "symptoms", "treatment", "medication", "daily", "family", "smokes", "alcohol", "previous",
      "admitted", "hospital", "clinic", "visit", "complains", "mild", "severe", "acute", "chronic", "started",
      "given", "therapy", "test", "result", "findings", "left", "right", "upper", "lower", "week", "morning",
      "evening", "since", "after", "before", "during", "appears", "well", "ill", "vital", "signs", "stable"};
  return words;
}

const WordList& ood_filler_words() {
  static const WordList words = {
      "gp", "surgery", "practice", "consultation", "attends", "aged", "mum", "concerned", "referral", "nhs",
      "practitioner", "appointment", "telephone", "review", "advice", "prescribed", "repeat", "safety", "netting",
      "community", "nurse", "carer", "locum", "registrar", "home", "pharmacy", "over", "counter", "recent",
      "holiday", "work", "school", "child", "elderly", "frail", "lives", "alone", "care", "plan", "options"};
  return words;
}

}  // namespace

void write_topic_corpus(const CorpusSpec& spec, std::ostream& out) {
  const auto& topics = topic_words();
  Rng rng(spec.seed);
  auto pick = [&](const WordList& list, std::size_t lo, std::size_t hi) {
    return list[lo + static_cast<std::size_t>(rng.below(hi - lo))];
  };

  auto emit = [&](const char* split, std::size_t count, bool ood) {
    for (std::size_t i = 0; i < count; ++i) {
      const int cls = static_cast<int>(rng.below(topics.size()));
      // Per-document difficulty: share of own-topic and distractor tokens.
      double own = 0.30, distract = 0.04;
      const double level = rng.uniform();
      if (ood) {
        own = 0.16;
        distract = 0.06;
      } else if (level < 0.10) {
        own = 0.06;
        distract = 0.12;
      } else if (level < 0.30) {
        own = 0.12;
        distract = 0.06;
      }
      const std::size_t length = 12 + static_cast<std::size_t>(rng.below(20));
      std::string text;
      for (std::size_t t = 0; t < length; ++t) {
        const double u = rng.uniform();
        const char* word = nullptr;
        if (u < own) {
          const auto& list = topics[static_cast<std::size_t>(cls)];
          word = ood ? pick(list, list.size() / 2, list.size()) : pick(list, 0, list.size());
        } else if (u < own + distract) {
          auto other = static_cast<std::size_t>(rng.below(topics.size() - 1));
          if (other >= static_cast<std::size_t>(cls)) ++other;
          word = pick(topics[other], 0, topics[other].size());
        } else {
          const auto& list = ood ? ood_filler_words() : filler_words();
          word = pick(list, 0, list.size());
        }
        if (!text.empty()) text.push_back(' ');
        text += word;
      }
      std::array<char, 48> guid{};
      std::snprintf(guid.data(), guid.size(), "%s-%05zu", split, i);
      nlohmann::json j = {{"guid", guid.data()}, {"split", split}, {"gold", cls}, {"text", text}};
      out << j.dump() << '\n';
    }
  };
  emit("train", spec.train, false);
  emit("validation", spec.validation, false);
  emit("test", spec.test, false);
  emit("ood", spec.ood, true);
}

}  // namespace cartograph::synthetic
