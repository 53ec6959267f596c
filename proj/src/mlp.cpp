#include "evade/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evade/rng.hpp"

namespace evade {

std::size_t MlpModel::parameter_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size();
}

std::array<double, 2> softmax2(double logit0, double logit1) {
  const double peak = std::max(logit0, logit1);
  const double e0 = std::exp(logit0 - peak);
  const double e1 = std::exp(logit1 - peak);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

std::vector<double> to_real(const BitVec& x) {
  return std::vector<double>(x.begin(), x.end());
}

namespace {

struct Activations {
  std::vector<double> h1, h2;  // post-rectifier
  double z0 = 0.0, z1 = 0.0;   // logits
  std::array<double, 2> p{};
};

Activations forward_pass(const MlpModel& net, const std::vector<double>& x) {
  if (x.size() != net.input_dim) {
    throw std::invalid_argument("mlp forward: dimension mismatch");
  }
  const std::size_t h = net.hidden;
  // inputs are sparse bit-vectors (plus a few flips); skip the zeros
  std::vector<std::size_t> nz;
  nz.reserve(64);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] != 0.0) nz.push_back(j);
  }
  Activations a;
  a.h1.resize(h);
  for (std::size_t i = 0; i < h; ++i) {
    double z = net.b1[i];
    const double* row = net.w1.data() + i * net.input_dim;
    for (std::size_t j : nz) z += row[j] * x[j];
    a.h1[i] = z > 0.0 ? z : 0.0;
  }
  a.h2.resize(h);
  for (std::size_t i = 0; i < h; ++i) {
    double z = net.b2[i];
    const double* row = net.w2.data() + i * h;
    for (std::size_t j = 0; j < h; ++j) z += row[j] * a.h1[j];
    a.h2[i] = z > 0.0 ? z : 0.0;
  }
  a.z0 = net.b3[0];
  a.z1 = net.b3[1];
  for (std::size_t j = 0; j < h; ++j) {
    a.z0 += net.w3[j] * a.h2[j];
    a.z1 += net.w3[h + j] * a.h2[j];
  }
  a.p = softmax2(a.z0, a.z1);
  return a;
}

}  // namespace

std::array<double, 2> mlp_forward(const MlpModel& net,
                                  const std::vector<double>& x) {
  return forward_pass(net, x).p;
}

std::vector<std::array<double, 2>> mlp_input_jacobian(
    const MlpModel& net, const std::vector<double>& x) {
  const Activations a = forward_pass(net, x);
  const std::size_t h = net.hidden;
  std::vector<std::array<double, 2>> jac(net.input_dim, {0.0, 0.0});

  for (int out = 0; out < 2; ++out) {
    // d p_out / d logits through the softmax
    std::array<double, 2> dz{};
    dz[0] = a.p[out] * ((out == 0 ? 1.0 : 0.0) - a.p[0]);
    dz[1] = a.p[out] * ((out == 1 ? 1.0 : 0.0) - a.p[1]);

    std::vector<double> dh2(h);
    for (std::size_t j = 0; j < h; ++j) {
      double g = dz[0] * net.w3[j] + dz[1] * net.w3[h + j];
      dh2[j] = a.h2[j] > 0.0 ? g : 0.0;
    }
    std::vector<double> dh1(h, 0.0);
    for (std::size_t i = 0; i < h; ++i) {
      if (dh2[i] == 0.0) continue;
      const double* row = net.w2.data() + i * h;
      for (std::size_t j = 0; j < h; ++j) dh1[j] += dh2[i] * row[j];
    }
    for (std::size_t j = 0; j < h; ++j) {
      if (a.h1[j] <= 0.0) dh1[j] = 0.0;
    }
    for (std::size_t i = 0; i < h; ++i) {
      if (dh1[i] == 0.0) continue;
      const double* row = net.w1.data() + i * net.input_dim;
      for (std::size_t j = 0; j < net.input_dim; ++j) {
        jac[j][out] += dh1[i] * row[j];
      }
    }
  }
  return jac;
}

double mlp_loss_grad(const MlpModel& net, const Dataset& data,
                     const std::vector<std::size_t>& batch, MlpModel& grad) {
  if (batch.empty()) throw std::invalid_argument("mlp_loss_grad: empty batch");
  const std::size_t h = net.hidden;
  const std::size_t m = net.input_dim;

  grad.input_dim = m;
  grad.hidden = h;
  grad.w1.assign(net.w1.size(), 0.0);
  grad.b1.assign(net.b1.size(), 0.0);
  grad.w2.assign(net.w2.size(), 0.0);
  grad.b2.assign(net.b2.size(), 0.0);
  grad.w3.assign(net.w3.size(), 0.0);
  grad.b3.assign(net.b3.size(), 0.0);

  double loss = 0.0;
  std::vector<double> x;
  for (std::size_t idx : batch) {
    const auto& s = data.samples[idx];
    x.assign(s.features.begin(), s.features.end());
    const Activations a = forward_pass(net, x);

    loss -= std::log(std::max(a.p[s.label], 1e-300));

    // d loss / d logits for softmax cross-entropy
    std::array<double, 2> dz{a.p[0], a.p[1]};
    dz[s.label] -= 1.0;

    for (int out = 0; out < 2; ++out) {
      for (std::size_t j = 0; j < h; ++j) {
        grad.w3[out * h + j] += dz[out] * a.h2[j];
      }
      grad.b3[out] += dz[out];
    }

    std::vector<double> dh2(h);
    for (std::size_t j = 0; j < h; ++j) {
      double g = dz[0] * net.w3[j] + dz[1] * net.w3[h + j];
      dh2[j] = a.h2[j] > 0.0 ? g : 0.0;
    }
    for (std::size_t i = 0; i < h; ++i) {
      if (dh2[i] == 0.0) continue;
      for (std::size_t j = 0; j < h; ++j) {
        grad.w2[i * h + j] += dh2[i] * a.h1[j];
      }
      grad.b2[i] += dh2[i];
    }

    std::vector<double> dh1(h, 0.0);
    for (std::size_t i = 0; i < h; ++i) {
      if (dh2[i] == 0.0) continue;
      const double* row = net.w2.data() + i * h;
      for (std::size_t j = 0; j < h; ++j) dh1[j] += dh2[i] * row[j];
    }
    for (std::size_t i = 0; i < h; ++i) {
      if (a.h1[i] <= 0.0 || dh1[i] == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (x[j] != 0.0) grad.w1[i * m + j] += dh1[i] * x[j];
      }
      grad.b1[i] += dh1[i];
    }
  }

  const double inv = 1.0 / batch.size();
  for (auto* v : {&grad.w1, &grad.b1, &grad.w2, &grad.b2, &grad.w3, &grad.b3}) {
    for (double& g : *v) g *= inv;
  }
  return loss * inv;
}

MlpClassifier::MlpClassifier(MlpModel net) : net_(std::move(net)) {
  if (net_.input_dim == 0) throw std::invalid_argument("mlp: zero input dim");
}

double MlpClassifier::decision_score(const BitVec& x) const {
  check_dim(x);
  return mlp_forward(net_, to_real(x))[1];
}

std::shared_ptr<const MlpClassifier> train_mlp(const Dataset& train,
                                               const TrainConfig& cfg) {
  if (train.size() == 0) throw std::invalid_argument("empty training set");
  const std::size_t malware = train.count_label(1);
  if (malware == 0 || malware == train.size()) {
    throw std::invalid_argument("training set has a single class");
  }

  const std::size_t m = train.dim();
  const std::size_t h = cfg.hidden_units;
  MlpModel net;
  net.input_dim = m;
  net.hidden = h;
  Rng rng(derive_seed(cfg.seed, "mlp_init"));
  auto he_init = [&](std::vector<double>& w, std::size_t fan_in,
                     std::size_t count) {
    w.resize(count);
    const double scale = std::sqrt(2.0 / fan_in);
    for (auto& v : w) v = rng.normal() * scale;
  };
  he_init(net.w1, m, h * m);
  net.b1.assign(h, 0.0);
  he_init(net.w2, h, h * h);
  net.b2.assign(h, 0.0);
  he_init(net.w3, h, 2 * h);
  net.b3.assign(2, 0.0);

  const std::size_t n = train.size();
  const std::size_t batch_size = std::max<std::size_t>(1, cfg.batch_size);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  MlpModel grad;
  std::vector<std::size_t> batch;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.seed, "mlp_epoch", epoch));
    shuffle_rng.shuffle(order);
    const double lr = cfg.learning_rate / std::sqrt(epoch + 1.0);
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t stop = std::min(n, start + batch_size);
      batch.assign(order.begin() + start, order.begin() + stop);
      mlp_loss_grad(net, train, batch, grad);
      auto step_w = [&](std::vector<double>& w, const std::vector<double>& g) {
        const double decay = 2.0 * cfg.regularization;
        for (std::size_t i = 0; i < w.size(); ++i) {
          w[i] -= lr * (g[i] + decay * w[i]);
        }
      };
      auto step_b = [&](std::vector<double>& w, const std::vector<double>& g) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
      };
      step_w(net.w1, grad.w1);
      step_b(net.b1, grad.b1);
      step_w(net.w2, grad.w2);
      step_b(net.b2, grad.b2);
      step_w(net.w3, grad.w3);
      step_b(net.b3, grad.b3);
    }
    for (double v : net.b3) {
      if (!std::isfinite(v)) {
        throw std::runtime_error("optimizer diverged at epoch " +
                                 std::to_string(epoch));
      }
    }
  }
  return std::make_shared<MlpClassifier>(std::move(net));
}

}  // namespace evade
