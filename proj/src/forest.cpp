#include "evade/forest.hpp"

#include <stdexcept>

#include "evade/parallel.hpp"

namespace evade {

TreeEnsemble::TreeEnsemble(ModelKind kind, std::vector<DecisionTree> trees,
                           std::size_t dim)
    : kind_(kind), trees_(std::move(trees)), dim_(dim) {
  if (trees_.empty()) throw std::invalid_argument("ensemble has no trees");
}

double TreeEnsemble::decision_score(const BitVec& x) const {
  check_dim(x);
  std::size_t votes = 0;
  for (const auto& tree : trees_) {
    votes += tree.decision_score(x) > 0.5;
  }
  return static_cast<double>(votes) / trees_.size();
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = rng.uniform_index(n);
  return out;
}

namespace {

ClassifierHandle train_ensemble(const Dataset& train, const TrainConfig& cfg,
                                ModelKind kind) {
  if (train.size() == 0) throw std::invalid_argument("empty training set");
  if (cfg.n_trees == 0) throw std::invalid_argument("n_trees must be >= 1");

  TrainConfig tree_cfg = cfg;
  if (kind == ModelKind::bagging) tree_cfg.max_split_features = 0;

  std::vector<std::vector<TreeNode>> nodes(cfg.n_trees);
  parallel_for(cfg.n_trees, [&](std::size_t t) {
    const std::uint64_t tree_seed = derive_seed(cfg.seed, "tree", t);
    std::vector<std::size_t> indices;
    if (cfg.bootstrap) {
      Rng boot(derive_seed(tree_seed, "bootstrap"));
      indices = bootstrap_indices(train.size(), boot);
    } else {
      indices.resize(train.size());
      for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    }
    Rng fit_rng(derive_seed(tree_seed, "tree_fit"));
    nodes[t] = fit_tree(train, indices, tree_cfg, fit_rng);
  });

  std::vector<DecisionTree> trees;
  trees.reserve(cfg.n_trees);
  for (auto& n : nodes) trees.emplace_back(std::move(n), train.dim());
  return std::make_shared<TreeEnsemble>(kind, std::move(trees), train.dim());
}

}  // namespace

ClassifierHandle train_random_forest(const Dataset& train,
                                     const TrainConfig& cfg) {
  return train_ensemble(train, cfg, ModelKind::forest);
}

ClassifierHandle train_bagging(const Dataset& train, const TrainConfig& cfg) {
  return train_ensemble(train, cfg, ModelKind::bagging);
}

}  // namespace evade
