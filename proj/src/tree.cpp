#include "evade/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace evade {

void Classifier::check_dim(const BitVec& x) const {
  if (x.size() != dim()) {
    throw std::invalid_argument("feature vector has dimension " +
                                std::to_string(x.size()) + ", model expects " +
                                std::to_string(dim()));
  }
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::tree: return "tree";
    case ModelKind::forest: return "forest";
    case ModelKind::bagging: return "bagging";
    case ModelKind::svm: return "svm";
    case ModelKind::logreg: return "logreg";
    case ModelKind::mlp: return "mlp";
  }
  throw std::logic_error("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "tree") return ModelKind::tree;
  if (name == "forest" || name == "rf") return ModelKind::forest;
  if (name == "bagging") return ModelKind::bagging;
  if (name == "svm") return ModelKind::svm;
  if (name == "logreg") return ModelKind::logreg;
  if (name == "mlp") return ModelKind::mlp;
  throw std::invalid_argument("unknown model kind: " + name);
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t dim)
    : nodes_(std::move(nodes)), dim_(dim) {
  if (nodes_.empty()) throw std::invalid_argument("tree has no nodes");
}

double DecisionTree::decision_score(const BitVec& x) const {
  check_dim(x);
  std::size_t at = 0;
  while (nodes_[at].feature >= 0) {
    const auto& n = nodes_[at];
    at = x[static_cast<std::size_t>(n.feature)] ? n.one_child : n.zero_child;
  }
  return nodes_[at].p_malware;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> depth(nodes_.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.feature < 0) {
      best = std::max(best, depth[i]);
    } else {
      // children always come after their parent in the build order
      depth[n.zero_child] = depth[i] + 1;
      depth[n.one_child] = depth[i] + 1;
    }
  }
  return best;
}

namespace {

double gini(std::size_t malware, std::size_t total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(malware) / total;
  return 2.0 * p * (1.0 - p);
}

struct TreeBuilder {
  const Dataset& data;
  const TrainConfig& cfg;
  Rng& rng;
  std::vector<TreeNode> nodes;

  std::size_t build(std::vector<std::size_t>& indices, std::size_t begin,
                    std::size_t end, std::size_t depth) {
    const std::size_t n = end - begin;
    std::size_t malware = 0;
    for (std::size_t i = begin; i < end; ++i) {
      malware += data.samples[indices[i]].label;
    }

    const std::size_t node_id = nodes.size();
    nodes.emplace_back();
    nodes[node_id].p_malware = n ? static_cast<double>(malware) / n : 0.0;

    const bool pure = malware == 0 || malware == n;
    if (pure || depth >= cfg.max_depth || n < 2 * cfg.min_leaf) {
      return node_id;
    }

    const std::size_t m = data.dim();
    const bool search_all =
        cfg.max_split_features == 0 || cfg.max_split_features >= m;
    std::vector<std::size_t> candidates;
    if (search_all) {
      candidates.resize(m);
      for (std::size_t f = 0; f < m; ++f) candidates[f] = f;
    } else {
      candidates = rng.sample_without_replacement(m, cfg.max_split_features);
      std::sort(candidates.begin(), candidates.end());
    }

    // Zero-gain splits are accepted while the node is impure so concepts
    // like XOR stay learnable; lower index wins ties by scan order.
    const double parent = gini(malware, n);
    double best_gain = -1.0;
    std::size_t best_feature = m;
    for (std::size_t f : candidates) {
      std::size_t n1 = 0, malware1 = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto& s = data.samples[indices[i]];
        if (s.features[f]) {
          ++n1;
          malware1 += s.label;
        }
      }
      const std::size_t n0 = n - n1;
      if (n0 < cfg.min_leaf || n1 < cfg.min_leaf) continue;
      const double child =
          (n0 * gini(malware - malware1, n0) + n1 * gini(malware1, n1)) / n;
      const double gain = parent - child;
      if (gain > best_gain + 1e-12) {
        best_gain = gain;
        best_feature = f;
      }
    }
    if (best_feature == m || best_gain < -1e-12) return node_id;

    auto mid = std::stable_partition(
        indices.begin() + begin, indices.begin() + end,
        [&](std::size_t idx) { return !data.samples[idx].features[best_feature]; });
    const std::size_t split = static_cast<std::size_t>(mid - indices.begin());

    nodes[node_id].feature = static_cast<std::int32_t>(best_feature);
    const std::size_t zero_child = build(indices, begin, split, depth + 1);
    nodes[node_id].zero_child = static_cast<std::uint32_t>(zero_child);
    const std::size_t one_child = build(indices, split, end, depth + 1);
    nodes[node_id].one_child = static_cast<std::uint32_t>(one_child);
    return node_id;
  }
};

}  // namespace

std::vector<TreeNode> fit_tree(const Dataset& data,
                               const std::vector<std::size_t>& indices,
                               const TrainConfig& cfg, Rng& rng) {
  if (indices.empty()) throw std::invalid_argument("fit_tree: no samples");
  TreeBuilder builder{data, cfg, rng, {}};
  std::vector<std::size_t> work = indices;
  builder.build(work, 0, work.size(), 0);
  return std::move(builder.nodes);
}

ClassifierHandle train_decision_tree(const Dataset& train,
                                     const TrainConfig& cfg) {
  if (train.size() == 0) throw std::invalid_argument("empty training set");
  std::vector<std::size_t> indices(train.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  Rng rng(derive_seed(cfg.seed, "tree_fit"));
  TrainConfig tree_cfg = cfg;
  tree_cfg.max_split_features = 0;  // a lone tree searches every feature
  auto nodes = fit_tree(train, indices, tree_cfg, rng);
  return std::make_shared<DecisionTree>(std::move(nodes), train.dim());
}

}  // namespace evade
