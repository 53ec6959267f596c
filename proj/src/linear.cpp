#include "evade/linear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evade {

double LinearDiscriminator::score(const BitVec& x) const {
  double z = b;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (x[i]) z += w[i];
  }
  return z;
}

double LinearDiscriminator::norm() const {
  double s = 0.0;
  for (double v : w) s += v * v;
  return std::sqrt(s);
}

double LinearDiscriminator::margin_distance(const BitVec& x) const {
  const double n = norm();
  if (n == 0.0) throw std::runtime_error("degenerate discriminator: ||w|| = 0");
  return std::abs(score(x)) / n;
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LinearModel::LinearModel(LinearDiscriminator d, ModelKind kind)
    : d_(std::move(d)), kind_(kind) {
  if (kind != ModelKind::svm && kind != ModelKind::logreg) {
    throw std::invalid_argument("linear classifier kind must be svm or logreg");
  }
}

double LinearModel::decision_score(const BitVec& x) const {
  check_dim(x);
  return d_.score(x);
}

namespace {

void check_two_classes(const Dataset& train) {
  if (train.size() == 0) throw std::invalid_argument("empty training set");
  const std::size_t malware = train.count_label(1);
  if (malware == 0 || malware == train.size()) {
    throw std::invalid_argument("training set has a single class");
  }
}

void check_finite(const std::vector<double>& w, double b, std::size_t epoch) {
  bool ok = std::isfinite(b);
  for (double v : w) ok = ok && std::isfinite(v);
  if (!ok) {
    throw std::runtime_error("optimizer diverged at epoch " +
                             std::to_string(epoch));
  }
}

}  // namespace

ClassifierHandle make_linear_classifier(LinearDiscriminator d, ModelKind kind) {
  return std::make_shared<LinearModel>(std::move(d), kind);
}

double svm_objective(const Dataset& data, const std::vector<double>& w,
                     double b, double regularization) {
  double loss = 0.0;
  for (const auto& s : data.samples) {
    double z = b;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (s.features[i]) z += w[i];
    }
    const double y = s.label ? 1.0 : -1.0;
    loss += std::max(0.0, 1.0 - y * z);
  }
  loss /= data.size();
  double reg = 0.0;
  for (double v : w) reg += v * v;
  return loss + regularization * reg;
}

ClassifierHandle train_linear_svm(const Dataset& train,
                                  const TrainConfig& cfg) {
  check_two_classes(train);
  const std::size_t m = train.dim();
  const std::size_t n = train.size();
  const std::size_t batch = std::max<std::size_t>(1, cfg.batch_size);

  std::vector<double> w(m, 0.0);
  double b = 0.0;
  std::vector<double> grad_w(m);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.learning_rate / std::sqrt(epoch + 1.0);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      double grad_b = 0.0;
      for (std::size_t i = start; i < stop; ++i) {
        const auto& s = train.samples[i];
        const double y = s.label ? 1.0 : -1.0;
        double z = b;
        for (std::size_t j = 0; j < m; ++j) {
          if (s.features[j]) z += w[j];
        }
        if (y * z < 1.0) {
          for (std::size_t j = 0; j < m; ++j) {
            if (s.features[j]) grad_w[j] -= y;
          }
          grad_b -= y;
        }
      }
      const double scale = lr / (stop - start);
      for (std::size_t j = 0; j < m; ++j) {
        w[j] -= scale * grad_w[j] + lr * 2.0 * cfg.regularization * w[j];
      }
      b -= scale * grad_b;
    }
    check_finite(w, b, epoch);
  }

  LinearDiscriminator d;
  d.w = std::move(w);
  d.b = b;
  return make_linear_classifier(std::move(d), ModelKind::svm);
}

double logreg_loss_grad(const Dataset& data, const std::vector<double>& w,
                        double b, double regularization,
                        std::vector<double>& grad_w, double& grad_b) {
  const std::size_t m = w.size();
  grad_w.assign(m, 0.0);
  grad_b = 0.0;
  double loss = 0.0;
  for (const auto& s : data.samples) {
    double z = b;
    for (std::size_t j = 0; j < m; ++j) {
      if (s.features[j]) z += w[j];
    }
    const double p = sigmoid(z);
    // stable -log P(y | z): log(1+e^-z) for y=1, log(1+e^z) for y=0
    if (s.label) {
      loss += z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    } else {
      loss += z >= 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    const double err = p - s.label;
    for (std::size_t j = 0; j < m; ++j) {
      if (s.features[j]) grad_w[j] += err;
    }
    grad_b += err;
  }
  loss /= data.size();
  grad_b /= data.size();
  const double inv_n = 1.0 / data.size();
  double reg = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    grad_w[j] = grad_w[j] * inv_n + 2.0 * regularization * w[j];
    reg += w[j] * w[j];
  }
  return loss + regularization * reg;
}

LinearDiscriminator train_logistic_regression(const Dataset& train,
                                              const TrainConfig& cfg) {
  check_two_classes(train);
  const std::size_t m = train.dim();
  const std::size_t n = train.size();
  const std::size_t batch = std::max<std::size_t>(1, cfg.batch_size);

  std::vector<double> w(m, 0.0);
  double b = 0.0;
  std::vector<double> grad_w(m);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.learning_rate / std::sqrt(epoch + 1.0);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      double grad_b = 0.0;
      for (std::size_t i = start; i < stop; ++i) {
        const auto& s = train.samples[i];
        double z = b;
        for (std::size_t j = 0; j < m; ++j) {
          if (s.features[j]) z += w[j];
        }
        const double err = sigmoid(z) - s.label;
        for (std::size_t j = 0; j < m; ++j) {
          if (s.features[j]) grad_w[j] += err;
        }
        grad_b += err;
      }
      const double scale = lr / (stop - start);
      for (std::size_t j = 0; j < m; ++j) {
        w[j] -= scale * grad_w[j] + lr * 2.0 * cfg.regularization * w[j];
      }
      b -= scale * grad_b;
    }
    check_finite(w, b, epoch);
  }

  LinearDiscriminator d;
  d.w = std::move(w);
  d.b = b;
  return d;
}

}  // namespace evade
