#include "evade/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "evade/knn.hpp"
#include "evade/linear.hpp"
#include "evade/parallel.hpp"
#include "evade/rng.hpp"

namespace evade {

std::size_t AdversarialSet::evaded_count() const {
  std::size_t c = 0;
  for (const auto& s : samples) c += s.evaded;
  return c;
}

double AdversarialSet::evasion_rate() const {
  return samples.empty() ? 0.0
                         : static_cast<double>(evaded_count()) / samples.size();
}

AdversarialSample flip_until_evasion(const Sample& x,
                                     const std::vector<std::size_t>& candidates,
                                     const Classifier& model, int y_star) {
  AdversarialSample adv;
  adv.original_id = x.id;
  adv.x_star = x.features;
  adv.y_star = y_star;
  if (model.predict(adv.x_star) == y_star) {
    adv.evaded = true;  // nothing to do
    return adv;
  }
  for (std::size_t f : candidates) {
    if (adv.x_star[f]) continue;
    adv.x_star[f] = 1;
    adv.delta.push_back(f);
    if (model.predict(adv.x_star) == y_star) {
      adv.evaded = true;
      break;
    }
  }
  std::sort(adv.delta.begin(), adv.delta.end());
  return adv;
}

namespace {

void check_context(const AttackContext& ctx) {
  if (!ctx.train || !ctx.test || !ctx.ranking || !ctx.model) {
    throw std::invalid_argument(
        "attack context incomplete (white-box needs data, subspace, model)");
  }
}

std::vector<std::size_t> malware_positions(const Dataset& d) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.samples[i].label == 1) out.push_back(i);
  }
  return out;
}

void canonicalize(AdversarialSet& set) {
  std::stable_sort(set.samples.begin(), set.samples.end(),
                   [](const AdversarialSample& a, const AdversarialSample& b) {
                     return a.original_id < b.original_id;
                   });
}

// Crafts every test-split malware sample against one shared candidate list.
AdversarialSet lambda_walk_attack(const AttackContext& ctx,
                                  const AttackConfig& cfg, LambdaMode mode,
                                  const std::string& scenario) {
  check_context(ctx);
  const LambdaSet lambda =
      lambda_features(*ctx.ranking, cfg.lambda_percent, mode, cfg.seed);
  const auto targets = malware_positions(*ctx.test);

  AdversarialSet set;
  set.scenario = scenario;
  set.config = cfg;
  set.samples.resize(targets.size());
  parallel_for(targets.size(), [&](std::size_t i) {
    set.samples[i] = flip_until_evasion(ctx.test->samples[targets[i]],
                                        lambda.indices, *ctx.model,
                                        ctx.target_label);
  });
  canonicalize(set);
  return set;
}

// Nearest-the-boundary malware selection used by the LR and ACO scenarios:
// ascending margin distance, ties to lower id, ceil(fraction * count) kept.
std::vector<std::size_t> select_near_discriminator(
    const Dataset& d, const std::vector<std::size_t>& malware,
    const LinearDiscriminator& disc, double fraction) {
  std::vector<std::size_t> order = malware;
  std::vector<double> dist(d.size(), 0.0);
  for (std::size_t i : malware) {
    dist[i] = disc.margin_distance(d.samples[i].features);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (dist[a] != dist[b]) return dist[a] < dist[b];
                     return d.samples[a].id < d.samples[b].id;
                   });
  const auto keep = static_cast<std::size_t>(
      std::min<double>(order.size(),
                       std::ceil(fraction * order.size() - 1e-9)));
  order.resize(std::max<std::size_t>(keep, 1));
  return order;
}

LinearDiscriminator fit_discriminator(const AttackContext& ctx,
                                      const AttackConfig& cfg) {
  TrainConfig lr_cfg;
  lr_cfg.seed = derive_seed(cfg.seed, "discriminator");
  return train_logistic_regression(*ctx.train, lr_cfg);
}

}  // namespace

AdversarialSet attack_trivial(const AttackContext& ctx,
                              const AttackConfig& cfg) {
  return lambda_walk_attack(ctx, cfg, LambdaMode::random, "trivial");
}

AdversarialSet attack_distribution(const AttackContext& ctx,
                                   const AttackConfig& cfg) {
  return lambda_walk_attack(ctx, cfg, LambdaMode::ranked_benign,
                            "distribution");
}

AdversarialSet attack_knn(const AttackContext& ctx, const AttackConfig& cfg) {
  check_context(ctx);
  if (cfg.malware_fraction <= 0.0 || cfg.malware_fraction > 1.0) {
    throw std::invalid_argument("malware_fraction outside (0, 1]");
  }
  const Dataset benign_pool = partition_by_class(*ctx.train).benign;
  if (benign_pool.size() < cfg.k) {
    throw std::invalid_argument("benign pool smaller than k");
  }

  const auto malware = malware_positions(*ctx.test);
  const auto n_select = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(cfg.malware_fraction * malware.size() - 1e-9)));
  Rng rng(derive_seed(cfg.seed, "knn_select"));
  auto picks = rng.sample_without_replacement(malware.size(),
                                              std::min(n_select, malware.size()));
  std::sort(picks.begin(), picks.end());

  // deterministic top-lambda features by importance
  const std::size_t m_sel = ctx.ranking->size();
  const auto n_lambda = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(cfg.lambda_percent * m_sel / 100.0 - 1e-9)));
  const std::vector<std::size_t> top_lambda(
      ctx.ranking->order.begin(),
      ctx.ranking->order.begin() + std::min(n_lambda, m_sel));

  AdversarialSet set;
  set.scenario = "knn";
  set.config = cfg;
  set.samples.resize(picks.size() * cfg.k);
  parallel_for(picks.size(), [&](std::size_t p) {
    const Sample& original = ctx.test->samples[malware[picks[p]]];
    const auto neighbors =
        knn_neighbors(original.features, benign_pool, cfg.k);
    for (std::size_t v = 0; v < neighbors.size(); ++v) {
      const BitVec& donor = benign_pool.samples[neighbors[v].index].features;
      AdversarialSample adv;
      adv.original_id = original.id;
      adv.x_star = original.features;
      adv.y_star = ctx.target_label;
      for (std::size_t f : top_lambda) {
        if (donor[f] && !adv.x_star[f]) {
          adv.x_star[f] = 1;
          adv.delta.push_back(f);
        }
      }
      std::sort(adv.delta.begin(), adv.delta.end());
      adv.evaded = ctx.model->predict(adv.x_star) == ctx.target_label;
      set.samples[p * cfg.k + v] = std::move(adv);
    }
  });
  canonicalize(set);
  return set;
}

AdversarialSet attack_lr(const AttackContext& ctx, const AttackConfig& cfg) {
  check_context(ctx);
  const LinearDiscriminator disc = fit_discriminator(ctx, cfg);
  const auto malware = malware_positions(*ctx.test);
  if (malware.empty()) {
    AdversarialSet set;
    set.scenario = "lr";
    set.config = cfg;
    return set;
  }
  const auto selected = select_near_discriminator(*ctx.test, malware, disc,
                                                  cfg.malware_fraction);
  const LambdaSet lambda = lambda_features(
      *ctx.ranking, cfg.lambda_percent, LambdaMode::ranked_benign, cfg.seed);

  AdversarialSet set;
  set.scenario = "lr";
  set.config = cfg;
  set.samples.resize(selected.size());
  parallel_for(selected.size(), [&](std::size_t i) {
    set.samples[i] = flip_until_evasion(ctx.test->samples[selected[i]],
                                        lambda.indices, *ctx.model,
                                        ctx.target_label);
  });
  canonicalize(set);
  return set;
}

std::array<double, 2> jsma_softmax(double logit0, double logit1) {
  return softmax2(logit0, logit1);
}

std::vector<std::array<double, 2>> jsma_jacobian(const MlpModel& net,
                                                 const BitVec& x) {
  return mlp_input_jacobian(net, to_real(x));
}

JsmaPick jsma_select_index(const std::vector<std::array<double, 2>>& jacobian,
                           const BitVec& x) {
  if (jacobian.size() != x.size()) {
    throw std::invalid_argument("jsma_select_index: dimension mismatch");
  }
  JsmaPick pick;
  bool found = false;
  double best = 0.0;
  for (std::size_t f = 0; f < x.size(); ++f) {
    if (x[f]) continue;
    const double g = jacobian[f][0];  // towards the benign output
    if (!found || g > best) {
      found = true;
      best = g;
      pick.index = f;
    }
  }
  if (!found) {
    throw std::invalid_argument("jsma_select_index: no zero-valued feature");
  }
  pick.positive_gradient = best > 0.0;
  return pick;
}

AdversarialSet attack_jsma(const AttackContext& ctx, const AttackConfig& cfg) {
  check_context(ctx);
  const auto* mlp = dynamic_cast<const MlpClassifier*>(ctx.model.get());
  if (!mlp) throw std::invalid_argument("jsma requires an mlp victim");
  const MlpModel& net = mlp->net();
  const auto targets = malware_positions(*ctx.test);

  AdversarialSet set;
  set.scenario = "jsma";
  set.config = cfg;
  set.samples.resize(targets.size());
  parallel_for(targets.size(), [&](std::size_t i) {
    const Sample& original = ctx.test->samples[targets[i]];
    AdversarialSample adv;
    adv.original_id = original.id;
    adv.x_star = original.features;
    adv.y_star = ctx.target_label;
    adv.evaded = ctx.model->predict(adv.x_star) == ctx.target_label;
    while (!adv.evaded && adv.delta.size() < cfg.jsma_max_mods) {
      const bool any_zero =
          std::find(adv.x_star.begin(), adv.x_star.end(), 0) !=
          adv.x_star.end();
      if (!any_zero) break;
      const auto jac = mlp_input_jacobian(net, to_real(adv.x_star));
      const JsmaPick pick = jsma_select_index(jac, adv.x_star);
      adv.x_star[pick.index] = 1;
      adv.delta.push_back(pick.index);
      adv.evaded = ctx.model->predict(adv.x_star) == ctx.target_label;
    }
    std::sort(adv.delta.begin(), adv.delta.end());
    set.samples[i] = std::move(adv);
  });
  canonicalize(set);
  return set;
}

AdversarialSet run_attack(const std::string& scenario,
                          const AttackContext& ctx, const AttackConfig& cfg) {
  if (scenario == "trivial") return attack_trivial(ctx, cfg);
  if (scenario == "distribution") return attack_distribution(ctx, cfg);
  if (scenario == "knn") return attack_knn(ctx, cfg);
  if (scenario == "lr") return attack_lr(ctx, cfg);
  if (scenario == "aco") return attack_aco(ctx, cfg);
  if (scenario == "jsma") return attack_jsma(ctx, cfg);
  throw std::invalid_argument("unknown attack scenario: " + scenario);
}

double evaluate_objective(const AdversarialSet& advset,
                          const Classifier& model) {
  if (advset.samples.empty()) {
    throw std::invalid_argument("evaluate_objective: empty adversarial set");
  }
  std::size_t hits = 0;
  for (const auto& s : advset.samples) {
    hits += model.predict(s.x_star) == s.y_star;
  }
  return static_cast<double>(hits) / advset.samples.size();
}

void save_adversarial(const AdversarialSet& advset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& s : advset.samples) {
    nlohmann::json j;
    j["original_id"] = s.original_id;
    j["flipped"] = s.delta;
    j["evaded"] = s.evaded;
    out << j.dump() << '\n';
  }
}

AdversarialSet load_adversarial(const std::string& path, const Dataset& data) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::map<std::string, const Sample*> by_id;
  for (const auto& s : data.samples) by_id[s.id] = &s;

  AdversarialSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(where + "invalid JSON (" + e.what() + ")");
    }
    AdversarialSample adv;
    adv.original_id = j.at("original_id").get<std::string>();
    adv.delta = j.at("flipped").get<std::vector<std::size_t>>();
    adv.evaded = j.at("evaded").get<bool>();
    auto it = by_id.find(adv.original_id);
    if (it == by_id.end()) {
      throw std::runtime_error(where + "unknown original_id " +
                               adv.original_id);
    }
    adv.x_star = it->second->features;
    for (std::size_t f : adv.delta) {
      if (f >= adv.x_star.size()) {
        throw std::runtime_error(where + "flip index out of range");
      }
      adv.x_star[f] = 1;
    }
    std::sort(adv.delta.begin(), adv.delta.end());
    set.samples.push_back(std::move(adv));
  }
  return set;
}

}  // namespace evade
