#pragma once

#include <array>

#include "evade/model.hpp"

namespace evade {

// m -> hidden -> hidden -> 2 feed-forward network with rectifier
// activations. Weights are row-major: w1 is hidden x m, w2 hidden x hidden,
// w3 2 x hidden.
struct MlpModel {
  std::size_t input_dim = 0;
  std::size_t hidden = 200;
  std::vector<double> w1, b1;
  std::vector<double> w2, b2;
  std::vector<double> w3, b3;

  std::size_t parameter_count() const;
};

// Stable two-class softmax (max subtraction before exponentiation).
std::array<double, 2> softmax2(double logit0, double logit1);

// Forward pass over the real relaxation of the input; returns class
// probabilities (benign, malware).
std::array<double, 2> mlp_forward(const MlpModel& net,
                                  const std::vector<double>& x);

// d softmax_i / d x_j for both outputs, by backpropagation. Entry j of the
// result holds (d p_benign / d x_j, d p_malware / d x_j).
std::vector<std::array<double, 2>> mlp_input_jacobian(
    const MlpModel& net, const std::vector<double>& x);

// Mean cross-entropy over the batch plus its gradient with respect to every
// weight, laid out like MlpModel. Returns the loss. Exposed for the
// finite-difference oracle tests; the trainer uses it per mini-batch.
double mlp_loss_grad(const MlpModel& net, const Dataset& data,
                     const std::vector<std::size_t>& batch, MlpModel& grad);

class MlpClassifier final : public Classifier {
 public:
  MlpClassifier(MlpModel net);

  ModelKind kind() const override { return ModelKind::mlp; }
  std::size_t dim() const override { return net_.input_dim; }
  // Malware-class probability.
  double decision_score(const BitVec& x) const override;
  double threshold() const override { return 0.5; }

  const MlpModel& net() const { return net_; }

 private:
  MlpModel net_;
};

std::shared_ptr<const MlpClassifier> train_mlp(const Dataset& train,
                                               const TrainConfig& cfg);

std::vector<double> to_real(const BitVec& x);

}  // namespace evade
