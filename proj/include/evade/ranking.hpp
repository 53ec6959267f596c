#pragma once

#include <cstdint>

#include "evade/dataset.hpp"

namespace evade {

struct FeatureRanking {
  // Feature indices, descending importance, ties to lower index.
  std::vector<std::size_t> order;
  // Importance per entry of `order`, nonnegative, sums to 1.
  std::vector<double> scores;
  // P(feature=1 | benign) - P(feature=1 | malware), per entry of `order`.
  std::vector<double> benign_bias;

  std::size_t size() const { return order.size(); }
};

enum class LambdaMode { random, ranked_benign };

struct LambdaSet {
  double lambda_percent = 0.0;
  std::vector<std::size_t> indices;  // original feature indices
};

// Regression-forest importance: trees regress the numeric label, features
// score by aggregated variance decrease, normalized to sum to 1.
FeatureRanking rank_features(const Dataset& train, std::size_t n_trees,
                             std::uint64_t seed);

// Restriction to the first min(count, size) entries; downstream modules
// work only in this subspace.
FeatureRanking select_top(const FeatureRanking& ranking, std::size_t count);

// lambda_percent of the subspace, ceil-rounded. mode=random draws
// uniformly; mode=ranked_benign draws the top decile of the
// importance*positive-benign-bias order first, then the remainder by
// weight, so growing lambda only extends the set (prefix of one seeded
// permutation).
LambdaSet lambda_features(const FeatureRanking& ranking, double lambda_percent,
                          LambdaMode mode, std::uint64_t seed);

void save_ranking(const FeatureRanking& ranking, const std::string& path);
FeatureRanking load_ranking(const std::string& path);

}  // namespace evade
