#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace evade {

// Dense binary feature vector; one byte per feature keeps indexing cheap
// and the attack code simple.
using BitVec = std::vector<std::uint8_t>;

// Maps feature names (permissions, API calls, intents...) to column indices.
class FeatureVocabulary {
 public:
  FeatureVocabulary() = default;
  explicit FeatureVocabulary(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t idx) const { return names_.at(idx); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> index_of(const std::string& name) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Sample {
  std::string id;
  int label = 0;  // 0 benign, 1 malware
  BitVec features;
};

struct Dataset {
  std::shared_ptr<const FeatureVocabulary> vocabulary;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  std::size_t dim() const { return vocabulary ? vocabulary->size() : 0; }
  std::size_t count_label(int label) const;
};

struct LoadResult {
  Dataset dataset;
  // Feature names present in the input but absent from the vocabulary,
  // with occurrence counts. These are dropped, not errors.
  std::unordered_map<std::string, std::size_t> unknown_dropped;
};

// One JSON object per line: {"id": ..., "label": 0|1, "features": [names]}.
// Malformed lines raise with the 1-based line number in the message.
LoadResult load_dataset(const std::string& path,
                        std::shared_ptr<const FeatureVocabulary> vocabulary);

// Vocabulary file: one feature name per line, order defines column index.
std::shared_ptr<const FeatureVocabulary> load_vocabulary(
    const std::string& path);
void save_vocabulary(const FeatureVocabulary& vocabulary,
                     const std::string& path);

void save_dataset(const Dataset& dataset, const std::string& path);

struct SplitResult {
  Dataset train;
  Dataset validation;
  Dataset test;
};

// Stratified split: each class is apportioned to the three parts by
// largest remainder, then assignment within each class is a seeded shuffle.
SplitResult split_dataset(const Dataset& dataset, double train_fraction,
                          double validation_fraction, double test_fraction,
                          std::uint64_t seed);

struct ClassPartition {
  Dataset benign;   // label 0
  Dataset malware;  // label 1
};
ClassPartition partition_by_class(const Dataset& dataset);

struct SyntheticConfig {
  std::size_t n_samples = 2000;
  std::size_t n_features = 400;
  // Total count of discriminative columns, split into a benign-indicative
  // and a malware-indicative half.
  std::size_t n_signal = 40;
  double malware_fraction = 0.5;
  double flip_noise = 0.05;        // chance a signal bit disobeys its class
  double background_density = 0.1; // P(bit = 1) off-signal
  std::uint64_t seed = 0;
  // Feature-name stems; defaults to a built-in pool of Android-style names.
  std::vector<std::string> vocab_seed_names;
};

struct SyntheticResult {
  Dataset dataset;
  // Ground truth for ranking checks: which columns carry class signal.
  std::vector<std::size_t> benign_signal;
  std::vector<std::size_t> malware_signal;
};

// Binary vectors with planted class signal. Benign-signal columns are
// mostly 1 on benign samples and mostly 0 on malware, malware-signal
// columns the reverse; everything else is label-independent noise.
SyntheticResult generate_synthetic(const SyntheticConfig& config);

}  // namespace evade
