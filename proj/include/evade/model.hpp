#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "evade/dataset.hpp"

namespace evade {

enum class ModelKind { tree, forest, bagging, svm, logreg, mlp };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

// One config for all trainers; each reads the fields it needs.
struct TrainConfig {
  std::size_t n_trees = 100;
  std::size_t max_split_features = 3;  // 0 = consider all features
  std::size_t max_depth = 20;
  std::size_t min_leaf = 2;
  bool bootstrap = true;
  double learning_rate = 0.1;   // decayed by 1/sqrt(epoch)
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double regularization = 1e-4;  // L2
  std::size_t hidden_units = 200;
  std::uint64_t seed = 0;
};

// Trained model. predict derives from decision_score so the score/label
// consistency invariant holds by construction: label 1 iff score > threshold.
// Thresholds: 0 for linear models, 0.5 for vote fractions and probabilities.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual ModelKind kind() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double decision_score(const BitVec& x) const = 0;
  virtual double threshold() const = 0;

  int predict(const BitVec& x) const {
    return decision_score(x) > threshold() ? 1 : 0;
  }

 protected:
  void check_dim(const BitVec& x) const;
};

using ClassifierHandle = std::shared_ptr<const Classifier>;

// Hyperplane w.x + b, shared by the LR/SVM victims, the attack
// discriminator, and the defense generator loop.
struct LinearDiscriminator {
  std::vector<double> w;
  double b = 0.0;

  double score(const BitVec& x) const;
  // Margin distance |w.x + b| / ||w||; the "near the discriminator" measure.
  double margin_distance(const BitVec& x) const;
  double norm() const;
};

ClassifierHandle make_linear_classifier(LinearDiscriminator d, ModelKind kind);

// Trains a classifier of the given kind; the defense retraining path and
// the CLI both dispatch through this.
ClassifierHandle train_model(ModelKind kind, const Dataset& train,
                             const TrainConfig& cfg);

}  // namespace evade
