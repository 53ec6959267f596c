#pragma once

#include "evade/model.hpp"

namespace evade {

class LinearModel final : public Classifier {
 public:
  LinearModel(LinearDiscriminator d, ModelKind kind);

  ModelKind kind() const override { return kind_; }
  std::size_t dim() const override { return d_.w.size(); }
  double decision_score(const BitVec& x) const override;
  double threshold() const override { return 0.0; }

  const LinearDiscriminator& discriminator() const { return d_; }

 private:
  LinearDiscriminator d_;
  ModelKind kind_;
};

// Hinge loss + L2 on w, minimized by subgradient descent over in-order
// mini-batches (deterministic, no shuffling). decision_score = w.x + b,
// threshold 0.
ClassifierHandle train_linear_svm(const Dataset& train, const TrainConfig& cfg);

// Mean cross-entropy minimized by gradient descent over in-order
// mini-batches. Predicted probability is logistic(w.x + b).
LinearDiscriminator train_logistic_regression(const Dataset& train,
                                              const TrainConfig& cfg);

// Mean hinge objective + reg * ||w||^2, for the optimizer oracle tests.
double svm_objective(const Dataset& data, const std::vector<double>& w,
                     double b, double regularization);

// Full-batch cross-entropy loss and its gradient at (w, b), for the
// finite-difference oracle tests. Returns the loss.
double logreg_loss_grad(const Dataset& data, const std::vector<double>& w,
                        double b, double regularization,
                        std::vector<double>& grad_w, double& grad_b);

double sigmoid(double z);

}  // namespace evade
