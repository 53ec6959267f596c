#include "evade/forest.hpp"
#include "evade/linear.hpp"
#include "evade/mlp.hpp"

namespace evade {

ClassifierHandle train_model(ModelKind kind, const Dataset& train,
                             const TrainConfig& cfg) {
  switch (kind) {
    case ModelKind::tree:
      return train_decision_tree(train, cfg);
    case ModelKind::forest:
      return train_random_forest(train, cfg);
    case ModelKind::bagging:
      return train_bagging(train, cfg);
    case ModelKind::svm:
      return train_linear_svm(train, cfg);
    case ModelKind::logreg:
      return make_linear_classifier(train_logistic_regression(train, cfg),
                                    ModelKind::logreg);
    case ModelKind::mlp:
      return train_mlp(train, cfg);
  }
  throw std::logic_error("unknown model kind");
}

}  // namespace evade
