#include "evade/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "evade/parallel.hpp"
#include "evade/rng.hpp"

namespace evade {

namespace {

constexpr std::size_t kRankTreeDepth = 12;
constexpr std::size_t kRankMinLeaf = 5;

// Regression tree on the numeric label; only the per-feature variance
// decrease is kept, the tree itself is discarded.
struct RegressionFit {
  const Dataset& data;
  std::vector<double>& importance;
  Rng& rng;
  std::size_t n_candidates;

  void build(std::vector<std::size_t>& indices, std::size_t begin,
             std::size_t end, std::size_t depth) {
    const std::size_t n = end - begin;
    std::size_t positives = 0;
    for (std::size_t i = begin; i < end; ++i) {
      positives += data.samples[indices[i]].label;
    }
    // binary labels: node variance is p(1-p)
    const double p = static_cast<double>(positives) / n;
    const double var = p * (1.0 - p);
    if (var == 0.0 || depth >= kRankTreeDepth || n < 2 * kRankMinLeaf) return;

    const std::size_t m = data.dim();
    auto candidates = rng.sample_without_replacement(m, n_candidates);
    std::sort(candidates.begin(), candidates.end());

    double best_decrease = 1e-12;
    std::size_t best_feature = m;
    for (std::size_t f : candidates) {
      std::size_t n1 = 0, pos1 = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto& s = data.samples[indices[i]];
        if (s.features[f]) {
          ++n1;
          pos1 += s.label;
        }
      }
      const std::size_t n0 = n - n1;
      if (n0 < kRankMinLeaf || n1 < kRankMinLeaf) continue;
      const double p0 = static_cast<double>(positives - pos1) / n0;
      const double p1 = static_cast<double>(pos1) / n1;
      const double decrease =
          n * var - n0 * p0 * (1.0 - p0) - n1 * p1 * (1.0 - p1);
      if (decrease > best_decrease) {
        best_decrease = decrease;
        best_feature = f;
      }
    }
    if (best_feature == m) return;

    importance[best_feature] += best_decrease;
    auto mid = std::stable_partition(
        indices.begin() + begin, indices.begin() + end, [&](std::size_t idx) {
          return !data.samples[idx].features[best_feature];
        });
    const std::size_t split = static_cast<std::size_t>(mid - indices.begin());
    build(indices, begin, split, depth + 1);
    build(indices, split, end, depth + 1);
  }
};

}  // namespace

FeatureRanking rank_features(const Dataset& train, std::size_t n_trees,
                             std::uint64_t seed) {
  if (train.size() == 0) throw std::invalid_argument("empty training set");
  const std::size_t malware = train.count_label(1);
  if (malware == 0 || malware == train.size()) {
    throw std::invalid_argument("ranking needs both classes");
  }
  const std::size_t m = train.dim();
  const std::size_t n_candidates = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(std::sqrt(double(m)))));

  std::vector<std::vector<double>> per_tree(n_trees);
  parallel_for(n_trees, [&](std::size_t t) {
    per_tree[t].assign(m, 0.0);
    const std::uint64_t tree_seed = derive_seed(seed, "rank_tree", t);
    Rng boot(derive_seed(tree_seed, "bootstrap"));
    std::vector<std::size_t> indices(train.size());
    for (auto& i : indices) i = boot.uniform_index(train.size());
    Rng fit_rng(derive_seed(tree_seed, "fit"));
    RegressionFit fit{train, per_tree[t], fit_rng, n_candidates};
    fit.build(indices, 0, indices.size(), 0);
  });

  std::vector<double> importance(m, 0.0);
  for (const auto& tree : per_tree) {
    for (std::size_t f = 0; f < m; ++f) importance[f] += tree[f];
  }
  double total = 0.0;
  for (double v : importance) total += v;
  if (total > 0.0) {
    for (double& v : importance) v /= total;
  } else {
    // no split anywhere (e.g. constant features); fall back to uniform
    std::fill(importance.begin(), importance.end(), 1.0 / m);
  }

  std::vector<std::size_t> order(m);
  for (std::size_t f = 0; f < m; ++f) order[f] = f;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (importance[a] != importance[b]) return importance[a] > importance[b];
    return a < b;
  });

  std::size_t n_benign = train.size() - malware;
  std::vector<double> on_benign(m, 0.0), on_malware(m, 0.0);
  for (const auto& s : train.samples) {
    auto& acc = s.label ? on_malware : on_benign;
    for (std::size_t f = 0; f < m; ++f) acc[f] += s.features[f];
  }

  FeatureRanking ranking;
  ranking.order = order;
  ranking.scores.reserve(m);
  ranking.benign_bias.reserve(m);
  for (std::size_t f : order) {
    ranking.scores.push_back(importance[f]);
    ranking.benign_bias.push_back(on_benign[f] / n_benign -
                                  on_malware[f] / malware);
  }
  return ranking;
}

FeatureRanking select_top(const FeatureRanking& ranking, std::size_t count) {
  if (count == 0) throw std::invalid_argument("select_top: count must be >= 1");
  const std::size_t keep = std::min(count, ranking.size());
  FeatureRanking out;
  out.order.assign(ranking.order.begin(), ranking.order.begin() + keep);
  out.scores.assign(ranking.scores.begin(), ranking.scores.begin() + keep);
  out.benign_bias.assign(ranking.benign_bias.begin(),
                         ranking.benign_bias.begin() + keep);
  double total = 0.0;
  for (double v : out.scores) total += v;
  if (total > 0.0) {
    for (double& v : out.scores) v /= total;
  } else if (keep > 0) {
    std::fill(out.scores.begin(), out.scores.end(), 1.0 / keep);
  }
  return out;
}

LambdaSet lambda_features(const FeatureRanking& ranking, double lambda_percent,
                          LambdaMode mode, std::uint64_t seed) {
  if (lambda_percent <= 0.0 || lambda_percent > 100.0) {
    throw std::invalid_argument("lambda_percent must be in (0, 100]");
  }
  const std::size_t m_sel = ranking.size();
  if (m_sel == 0) throw std::invalid_argument("empty ranking");
  const auto want = static_cast<std::size_t>(
      std::ceil(lambda_percent * m_sel / 100.0 - 1e-9));
  const std::size_t n_lambda = std::min(std::max<std::size_t>(want, 1), m_sel);

  // Both modes materialize a full seeded permutation and take its prefix,
  // so growing lambda under one seed only extends the set.
  std::vector<std::size_t> permutation;
  Rng rng(derive_seed(seed, "lambda"));
  if (mode == LambdaMode::random) {
    permutation = ranking.order;
    rng.shuffle(permutation);
  } else {
    // positions into the ranking, heaviest benign-typical features first
    std::vector<std::size_t> pos(m_sel);
    for (std::size_t i = 0; i < m_sel; ++i) pos[i] = i;
    std::vector<double> weight(m_sel);
    for (std::size_t i = 0; i < m_sel; ++i) {
      weight[i] =
          ranking.scores[i] * std::max(ranking.benign_bias[i], 0.0) + 1e-12;
    }
    std::stable_sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
      if (weight[a] != weight[b]) return weight[a] > weight[b];
      return ranking.order[a] < ranking.order[b];
    });

    // draw the top decile first, then the rest, weighted without replacement
    const auto decile = static_cast<std::size_t>(
        std::min<double>(m_sel, std::ceil(m_sel * 0.1)));
    auto draw_pool = [&](std::size_t begin, std::size_t end) {
      std::vector<std::size_t> pool(pos.begin() + begin, pos.begin() + end);
      std::vector<double> pool_w;
      pool_w.reserve(pool.size());
      for (std::size_t p : pool) pool_w.push_back(weight[p]);
      while (!pool.empty()) {
        const std::size_t pick = rng.weighted_index(pool_w);
        permutation.push_back(ranking.order[pool[pick]]);
        pool.erase(pool.begin() + pick);
        pool_w.erase(pool_w.begin() + pick);
      }
    };
    permutation.reserve(m_sel);
    draw_pool(0, decile);
    draw_pool(decile, m_sel);
  }

  LambdaSet set;
  set.lambda_percent = lambda_percent;
  set.indices.assign(permutation.begin(), permutation.begin() + n_lambda);
  return set;
}

void save_ranking(const FeatureRanking& ranking, const std::string& path) {
  nlohmann::json j;
  j["order"] = ranking.order;
  j["scores"] = ranking.scores;
  j["benign_bias"] = ranking.benign_bias;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

FeatureRanking load_ranking(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  FeatureRanking ranking;
  ranking.order = j.at("order").get<std::vector<std::size_t>>();
  ranking.scores = j.at("scores").get<std::vector<double>>();
  ranking.benign_bias = j.at("benign_bias").get<std::vector<double>>();
  if (ranking.scores.size() != ranking.order.size() ||
      ranking.benign_bias.size() != ranking.order.size()) {
    throw std::runtime_error(path + ": ranking arrays disagree in length");
  }
  return ranking;
}

}  // namespace evade
