#pragma once

#include "evade/tree.hpp"

namespace evade {

// Bootstrap ensemble of CART trees. Forest and bagging share everything
// except split-candidate breadth: forest draws max_split_features
// candidates per node, bagging always searches all features.
class TreeEnsemble final : public Classifier {
 public:
  TreeEnsemble(ModelKind kind, std::vector<DecisionTree> trees,
               std::size_t dim);

  ModelKind kind() const override { return kind_; }
  std::size_t dim() const override { return dim_; }
  // Fraction of trees voting malware.
  double decision_score(const BitVec& x) const override;
  double threshold() const override { return 0.5; }

  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  ModelKind kind_;
  std::vector<DecisionTree> trees_;
  std::size_t dim_;
};

ClassifierHandle train_random_forest(const Dataset& train,
                                     const TrainConfig& cfg);
ClassifierHandle train_bagging(const Dataset& train, const TrainConfig& cfg);

std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng);

}  // namespace evade
