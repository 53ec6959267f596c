#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evade/attacks.hpp"
#include "evade/linear.hpp"
#include "evade/parallel.hpp"
#include "evade/rng.hpp"

namespace evade {

namespace {

// Ant-colony flip-set search for one malware sample. Ants sample flip-sets
// of a growing cardinality proportionally to pheromone * benign bias; a
// candidate is kept only if its margin distance stays inside the acceptance
// band (within ACOthreshold and no farther out than the starting sample),
// and every kept candidate is tested against the victim.
AdversarialSample aco_craft(const Sample& original,
                            const LinearDiscriminator& disc,
                            const Classifier& model,
                            const std::vector<std::size_t>& subspace,
                            const std::vector<double>& benign_bias,
                            const AcoParams& params, int y_star,
                            std::uint64_t seed) {
  AdversarialSample adv;
  adv.original_id = original.id;
  adv.x_star = original.features;
  adv.y_star = y_star;
  if (model.predict(adv.x_star) == y_star) {
    adv.evaded = true;
    return adv;
  }

  // zero-valued features of the working subspace are the search variables
  std::vector<std::size_t> variables;
  std::vector<double> bias;
  for (std::size_t i = 0; i < subspace.size(); ++i) {
    if (!original.features[subspace[i]]) {
      variables.push_back(subspace[i]);
      bias.push_back(std::max(benign_bias[i], 0.0) + 1e-9);
    }
  }
  if (variables.empty()) return adv;

  const double start_distance = disc.margin_distance(original.features);
  const double threshold =
      params.threshold >= 0.0 ? params.threshold : start_distance;
  const double band = std::min(threshold, start_distance);

  std::vector<double> pheromone(variables.size(), 1.0);
  std::vector<double> draw_weight(variables.size());
  Rng rng(seed);

  BitVec candidate;
  std::vector<std::size_t> flips;
  std::vector<std::size_t> best_flips;
  double best_distance = start_distance;
  bool have_best = false;

  std::size_t cardinality = 1;
  std::size_t stall = 0;
  for (std::size_t iter = 0; iter < params.max_iter; ++iter) {
    bool improved = false;
    for (std::size_t ant = 0; ant < params.n_ants; ++ant) {
      const std::size_t c = std::min(cardinality, variables.size());
      for (std::size_t i = 0; i < variables.size(); ++i) {
        draw_weight[i] = pheromone[i] * bias[i];
      }
      flips.clear();
      for (std::size_t pick = 0; pick < c; ++pick) {
        const std::size_t at = rng.weighted_index(draw_weight);
        flips.push_back(at);
        draw_weight[at] = 0.0;
      }

      candidate = original.features;
      for (std::size_t at : flips) candidate[variables[at]] = 1;
      const double distance = disc.margin_distance(candidate);
      if (distance > band + 1e-12) continue;

      // accepted: reinforce, remember the closest, try the victim
      const double quality =
          band > 0.0 ? std::max(0.0, 1.0 - distance / band) : 1.0;
      for (std::size_t at : flips) {
        pheromone[at] += params.deposit * quality;
      }
      if (!have_best || distance < best_distance - 1e-12) {
        have_best = true;
        best_distance = distance;
        best_flips = flips;
        improved = true;
      }
      if (model.predict(candidate) == y_star) {
        adv.x_star = candidate;
        adv.evaded = true;
        for (std::size_t at : flips) adv.delta.push_back(variables[at]);
        std::sort(adv.delta.begin(), adv.delta.end());
        return adv;
      }
    }

    for (double& p : pheromone) {
      p = std::max(p * (1.0 - params.evaporation), 1e-6);
    }
    if (improved) {
      stall = 0;
    } else if (++stall >= params.cardinality_stall) {
      stall = 0;
      if (cardinality < variables.size()) ++cardinality;
    }
  }

  // no evasion: report the closest accepted candidate, if any
  if (have_best) {
    for (std::size_t at : best_flips) {
      adv.x_star[variables[at]] = 1;
      adv.delta.push_back(variables[at]);
    }
    std::sort(adv.delta.begin(), adv.delta.end());
  }
  return adv;
}

}  // namespace

AdversarialSet attack_aco(const AttackContext& ctx, const AttackConfig& cfg) {
  if (!ctx.train || !ctx.test || !ctx.ranking || !ctx.model) {
    throw std::invalid_argument(
        "attack context incomplete (white-box needs data, subspace, model)");
  }
  TrainConfig lr_cfg;
  lr_cfg.seed = derive_seed(cfg.seed, "discriminator");
  const LinearDiscriminator disc = train_logistic_regression(*ctx.train, lr_cfg);

  std::vector<std::size_t> malware;
  std::vector<double> dist(ctx.test->size(), 0.0);
  for (std::size_t i = 0; i < ctx.test->size(); ++i) {
    if (ctx.test->samples[i].label == 1) {
      malware.push_back(i);
      dist[i] = disc.margin_distance(ctx.test->samples[i].features);
    }
  }
  AdversarialSet set;
  set.scenario = "aco";
  set.config = cfg;
  if (malware.empty()) return set;

  std::stable_sort(malware.begin(), malware.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (dist[a] != dist[b]) return dist[a] < dist[b];
                     return ctx.test->samples[a].id < ctx.test->samples[b].id;
                   });
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(cfg.malware_fraction * malware.size() - 1e-9)));
  malware.resize(std::min(keep, malware.size()));

  // restrict the search to the first max_variables ranked features
  const std::size_t m_vars = std::min(cfg.aco.max_variables, ctx.ranking->size());
  std::vector<std::size_t> subspace(ctx.ranking->order.begin(),
                                    ctx.ranking->order.begin() + m_vars);
  std::vector<double> bias(ctx.ranking->benign_bias.begin(),
                           ctx.ranking->benign_bias.begin() + m_vars);

  set.samples.resize(malware.size());
  parallel_for(malware.size(), [&](std::size_t i) {
    set.samples[i] = aco_craft(ctx.test->samples[malware[i]], disc, *ctx.model,
                               subspace, bias, cfg.aco, ctx.target_label,
                               derive_seed(cfg.seed, "aco", i));
  });
  std::stable_sort(set.samples.begin(), set.samples.end(),
                   [](const AdversarialSample& a, const AdversarialSample& b) {
                     return a.original_id < b.original_id;
                   });
  return set;
}

}  // namespace evade
