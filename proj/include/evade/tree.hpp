#pragma once

#include "evade/model.hpp"
#include "evade/rng.hpp"

namespace evade {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  std::uint32_t zero_child = 0;
  std::uint32_t one_child = 0;
  double p_malware = 0.0;  // leaf class-probability estimate
};

// Binary CART over {0,1} features: every split tests "feature == 1".
class DecisionTree final : public Classifier {
 public:
  DecisionTree(std::vector<TreeNode> nodes, std::size_t dim);

  ModelKind kind() const override { return ModelKind::tree; }
  std::size_t dim() const override { return dim_; }
  double decision_score(const BitVec& x) const override;
  double threshold() const override { return 0.5; }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t dim_;
};

// Gini-impurity CART. Zero-gain splits are allowed while a node is impure
// (otherwise parity-style concepts are unlearnable); ties go to the lower
// feature index. max_split_features = 0 or >= m searches all features,
// otherwise that many uniformly drawn candidates per node.
ClassifierHandle train_decision_tree(const Dataset& train,
                                     const TrainConfig& cfg);

// Internal fitting entry shared with the ensemble trainers.
std::vector<TreeNode> fit_tree(const Dataset& data,
                               const std::vector<std::size_t>& indices,
                               const TrainConfig& cfg, Rng& rng);

}  // namespace evade
