#include "evade/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "evade/rng.hpp"

namespace evade {

FeatureVocabulary::FeatureVocabulary(std::vector<std::string> names)
    : names_(std::move(names)) {
  index_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    auto [it, inserted] = index_.emplace(names_[i], i);
    if (!inserted) {
      throw std::invalid_argument("duplicate feature name: " + names_[i]);
    }
  }
  if (names_.empty()) {
    throw std::invalid_argument("vocabulary must not be empty");
  }
}

std::optional<std::size_t> FeatureVocabulary::index_of(
    const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dataset::count_label(int label) const {
  std::size_t c = 0;
  for (const auto& s : samples) c += (s.label == label);
  return c;
}

namespace {

struct RawRecord {
  std::string id;
  int label;
  std::vector<std::string> features;
};

RawRecord parse_record(const std::string& line, const std::string& path,
                       std::size_t line_no) {
  const std::string where = path + ":" + std::to_string(line_no) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(where + "invalid JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw std::runtime_error(where + "record is not an object");
  if (!j.contains("id") || !j["id"].is_string()) {
    throw std::runtime_error(where + "missing string field \"id\"");
  }
  if (!j.contains("label") || !j["label"].is_number_integer()) {
    throw std::runtime_error(where + "missing integer field \"label\"");
  }
  const int label = j["label"].get<int>();
  if (label != 0 && label != 1) {
    throw std::runtime_error(where + "label must be 0 or 1, got " +
                             std::to_string(label));
  }
  if (!j.contains("features") || !j["features"].is_array()) {
    throw std::runtime_error(where + "missing array field \"features\"");
  }
  RawRecord rec;
  rec.id = j["id"].get<std::string>();
  rec.label = label;
  for (const auto& f : j["features"]) {
    if (!f.is_string()) {
      throw std::runtime_error(where + "features must be strings");
    }
    rec.features.push_back(f.get<std::string>());
  }
  return rec;
}

}  // namespace

LoadResult load_dataset(const std::string& path,
                        std::shared_ptr<const FeatureVocabulary> vocabulary) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    records.push_back(parse_record(line, path, line_no));
  }
  if (records.empty()) throw std::runtime_error(path + ": no records");

  if (!vocabulary) {
    std::set<std::string> seen;
    for (const auto& r : records) seen.insert(r.features.begin(), r.features.end());
    if (seen.empty()) {
      throw std::runtime_error(path + ": no features observed, cannot build vocabulary");
    }
    vocabulary = std::make_shared<FeatureVocabulary>(
        std::vector<std::string>(seen.begin(), seen.end()));
  }

  LoadResult result;
  result.dataset.vocabulary = vocabulary;
  result.dataset.samples.reserve(records.size());
  for (auto& r : records) {
    Sample s;
    s.id = std::move(r.id);
    s.label = r.label;
    s.features.assign(vocabulary->size(), 0);
    for (const auto& f : r.features) {
      if (auto idx = vocabulary->index_of(f)) {
        s.features[*idx] = 1;
      } else {
        ++result.unknown_dropped[f];
      }
    }
    result.dataset.samples.push_back(std::move(s));
  }
  return result;
}

std::shared_ptr<const FeatureVocabulary> load_vocabulary(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    names.push_back(line);
  }
  return std::make_shared<FeatureVocabulary>(std::move(names));
}

void save_vocabulary(const FeatureVocabulary& vocabulary,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& n : vocabulary.names()) out << n << '\n';
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& s : dataset.samples) {
    nlohmann::json j;
    j["id"] = s.id;
    j["label"] = s.label;
    auto features = nlohmann::json::array();
    for (std::size_t i = 0; i < s.features.size(); ++i) {
      if (s.features[i]) features.push_back(dataset.vocabulary->name(i));
    }
    j["features"] = std::move(features);
    out << j.dump() << '\n';
  }
}

namespace {

// Largest-remainder apportionment of `total` into parts proportional to
// `fractions`; ties broken by part order.
std::vector<std::size_t> apportion(std::size_t total,
                                   const std::vector<double>& fractions) {
  std::vector<std::size_t> counts(fractions.size());
  std::vector<double> remainder(fractions.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    double exact = total * fractions[i];
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[i] = exact - counts[i];
    assigned += counts[i];
  }
  std::vector<std::size_t> order(fractions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) {
    ++counts[order[i % order.size()]];
  }
  return counts;
}

}  // namespace

SplitResult split_dataset(const Dataset& dataset, double train_fraction,
                          double validation_fraction, double test_fraction,
                          std::uint64_t seed) {
  if (std::abs(train_fraction + validation_fraction + test_fraction - 1.0) >
      1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }
  if (dataset.size() < 5) {
    throw std::invalid_argument("dataset too small to split (n < 5)");
  }

  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    by_class[dataset.samples[i].label].push_back(i);
  }
  for (int label : {0, 1}) {
    if (!by_class[label].empty() && by_class[label].size() < 3) {
      throw std::invalid_argument(
          "class " + std::to_string(label) +
          " has fewer than 3 members, cannot stratify");
    }
  }

  SplitResult result;
  for (Dataset* part : {&result.train, &result.validation, &result.test}) {
    part->vocabulary = dataset.vocabulary;
  }
  const std::vector<double> fractions{train_fraction, validation_fraction,
                                      test_fraction};
  for (int label : {0, 1}) {
    auto& members = by_class[label];
    Rng rng(derive_seed(seed, "split", static_cast<std::uint64_t>(label)));
    rng.shuffle(members);
    auto counts = apportion(members.size(), fractions);
    std::size_t pos = 0;
    Dataset* parts[3] = {&result.train, &result.validation, &result.test};
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t k = 0; k < counts[p]; ++k, ++pos) {
        parts[p]->samples.push_back(dataset.samples[members[pos]]);
      }
    }
  }
  return result;
}

ClassPartition partition_by_class(const Dataset& dataset) {
  ClassPartition parts;
  parts.benign.vocabulary = dataset.vocabulary;
  parts.malware.vocabulary = dataset.vocabulary;
  for (const auto& s : dataset.samples) {
    (s.label == 0 ? parts.benign : parts.malware).samples.push_back(s);
  }
  return parts;
}

namespace {

// Stems modeled on real Android static features (permissions, API calls,
// intents, hardware components).
const std::vector<std::string>& default_name_pool() {
  static const std::vector<std::string> pool{
      "android.permission.SEND_SMS",
      "android.permission.READ_PHONE_STATE",
      "android.permission.INTERNET",
      "android.permission.RECEIVE_BOOT_COMPLETED",
      "android.permission.ACCESS_FINE_LOCATION",
      "android.permission.WRITE_EXTERNAL_STORAGE",
      "android.permission.READ_CONTACTS",
      "android.permission.CALL_PHONE",
      "st.brothas.mtgoxwidget.permission.C2D_MESSAGE",
      "com.android.launcher.permission.INSTALL_SHORTCUT",
      "Landroid/app/WallpaperManager;->clear",
      "Landroid/telephony/SmsManager;->sendTextMessage",
      "Landroid/telephony/TelephonyManager;->getDeviceId",
      "Landroid/content/Context;->getSystemService",
      "Ljava/lang/Runtime;->exec",
      "Ldalvik/system/DexClassLoader;-><init>",
      "Landroid/net/ConnectivityManager;->getActiveNetworkInfo",
      "Landroid/location/LocationManager;->getLastKnownLocation",
      "com.airpush.android.PushServiceStart58925",
      "android.intent.action.BOOT_COMPLETED",
      "android.intent.action.PACKAGE_ADDED",
      "android.intent.action.SMS_RECEIVED",
      "com.google.android.c2dm.intent.RECEIVE",
      "android.hardware.touchscreen",
      "android.hardware.camera",
      "android.hardware.location.gps",
      "android.hardware.wifi",
      "android.hardware.telephony",
  };
  return pool;
}

}  // namespace

SyntheticResult generate_synthetic(const SyntheticConfig& config) {
  if (config.n_samples == 0 || config.n_features == 0) {
    throw std::invalid_argument("synthetic: n and m must be positive");
  }
  if (config.n_signal > config.n_features) {
    throw std::invalid_argument("synthetic: n_signal > m");
  }
  if (config.flip_noise < 0.0 || config.flip_noise > 0.5) {
    throw std::invalid_argument("synthetic: flip_noise outside [0, 0.5]");
  }
  if (config.malware_fraction <= 0.0 || config.malware_fraction >= 1.0) {
    throw std::invalid_argument("synthetic: malware_fraction outside (0, 1)");
  }

  const auto& pool = config.vocab_seed_names.empty() ? default_name_pool()
                                                     : config.vocab_seed_names;
  std::vector<std::string> names;
  names.reserve(config.n_features);
  for (std::size_t i = 0; i < config.n_features; ++i) {
    const std::string& stem = pool[i % pool.size()];
    const std::size_t round = i / pool.size();
    names.push_back(round == 0 ? stem : stem + "_" + std::to_string(round));
  }
  std::sort(names.begin(), names.end());
  auto vocabulary =
      std::make_shared<FeatureVocabulary>(std::move(names));

  SyntheticResult result;
  result.dataset.vocabulary = vocabulary;

  // 0 = background noise, 1 = benign-indicative, 2 = malware-indicative.
  std::vector<std::uint8_t> role(config.n_features, 0);
  {
    Rng rng(derive_seed(config.seed, "signal"));
    auto chosen =
        rng.sample_without_replacement(config.n_features, config.n_signal);
    const std::size_t n_benign_sig = config.n_signal / 2;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      role[chosen[i]] = i < n_benign_sig ? 1 : 2;
      (i < n_benign_sig ? result.benign_signal : result.malware_signal)
          .push_back(chosen[i]);
    }
    std::sort(result.benign_signal.begin(), result.benign_signal.end());
    std::sort(result.malware_signal.begin(), result.malware_signal.end());
  }

  std::vector<int> labels(config.n_samples, 0);
  {
    auto n_malware = static_cast<std::size_t>(
        std::llround(config.n_samples * config.malware_fraction));
    n_malware = std::clamp<std::size_t>(n_malware, 1, config.n_samples - 1);
    std::fill(labels.begin(), labels.begin() + n_malware, 1);
    Rng rng(derive_seed(config.seed, "labels"));
    rng.shuffle(labels);
  }

  result.dataset.samples.reserve(config.n_samples);
  for (std::size_t i = 0; i < config.n_samples; ++i) {
    Rng rng(derive_seed(config.seed, "sample", i));
    Sample s;
    char id[32];
    std::snprintf(id, sizeof id, "synth-%05zu", i);
    s.id = id;
    s.label = labels[i];
    s.features.resize(config.n_features);
    for (std::size_t j = 0; j < config.n_features; ++j) {
      double p;
      if (role[j] == 0) {
        p = config.background_density;
      } else {
        const bool aligned = (role[j] == 1) == (s.label == 0);
        p = aligned ? 1.0 - config.flip_noise : config.flip_noise;
      }
      s.features[j] = rng.bernoulli(p) ? 1 : 0;
    }
    result.dataset.samples.push_back(std::move(s));
  }
  return result;
}

}  // namespace evade
