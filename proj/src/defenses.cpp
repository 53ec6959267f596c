#include "evade/defenses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evade/forest.hpp"
#include "evade/linear.hpp"
#include "evade/parallel.hpp"
#include "evade/rng.hpp"

namespace evade {

Dataset make_poisoned_eval(const Dataset& test,
                           const AdversarialSet& adversarial) {
  Dataset out;
  out.vocabulary = test.vocabulary;
  for (const auto& s : test.samples) {
    if (s.label == 0) out.samples.push_back(s);
  }
  std::size_t k = 0;
  for (const auto& adv : adversarial.samples) {
    Sample s;
    s.id = adv.original_id + "#adv" + std::to_string(k++);
    s.label = 1;  // crafted samples keep their true class
    s.features = adv.x_star;
    out.samples.push_back(std::move(s));
  }
  return out;
}

DefenseReport adversarial_training(const Dataset& train,
                                   const AdversarialSet& adversarial,
                                   ClassifierHandle victim,
                                   const Dataset& poisoned_eval,
                                   const TrainConfig& cfg,
                                   std::uint64_t seed) {
  if (!victim) throw std::invalid_argument("missing victim model");

  Dataset retrain_set;
  retrain_set.vocabulary = train.vocabulary;
  {
    Rng rng(derive_seed(seed, "draw_original"));
    const auto n = static_cast<std::size_t>(std::llround(0.6 * train.size()));
    auto picks = rng.sample_without_replacement(train.size(), n);
    std::sort(picks.begin(), picks.end());
    for (std::size_t i : picks) retrain_set.samples.push_back(train.samples[i]);
  }
  {
    Rng rng(derive_seed(seed, "draw_adversarial"));
    const auto n = static_cast<std::size_t>(
        std::llround(0.6 * adversarial.samples.size()));
    auto picks =
        rng.sample_without_replacement(adversarial.samples.size(), n);
    std::sort(picks.begin(), picks.end());
    for (std::size_t i : picks) {
      const auto& adv = adversarial.samples[i];
      Sample s;
      s.id = adv.original_id + "#adv" + std::to_string(i);
      s.label = 1;  // corrected label
      s.features = adv.x_star;
      retrain_set.samples.push_back(std::move(s));
    }
  }
  if (retrain_set.samples.empty()) {
    throw std::invalid_argument("adversarial training: empty retraining union");
  }

  TrainConfig rf_cfg = cfg;
  rf_cfg.seed = derive_seed(seed, "retrain");
  DefenseReport report;
  report.model_new = train_random_forest(retrain_set, rf_cfg);
  report.pre_metrics = evaluate_model(*victim, poisoned_eval);
  report.post_metrics = evaluate_model(*report.model_new, poisoned_eval);
  report.synthetic_count = 0;
  return report;
}

GanDefenseResult gan_defense(const Dataset& train,
                             const FeatureRanking& ranking,
                             double lambda_percent, double malware_fraction,
                             ClassifierHandle victim,
                             const Dataset& poisoned_eval,
                             const TrainConfig& cfg, std::uint64_t seed) {
  if (!victim) throw std::invalid_argument("missing victim model");
  if (malware_fraction <= 0.0 || malware_fraction > 1.0) {
    throw std::invalid_argument("malware_fraction outside (0, 1]");
  }

  TrainConfig lr_cfg;
  lr_cfg.seed = derive_seed(seed, "poison_model");
  const LinearDiscriminator disc = train_logistic_regression(train, lr_cfg);
  if (disc.norm() == 0.0) {
    throw std::runtime_error("degenerate discriminator: ||w|| = 0");
  }

  // Lesslikely: training malware nearest the discriminator boundary
  std::vector<std::size_t> malware;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.samples[i].label == 1) malware.push_back(i);
  }
  if (malware.empty()) {
    throw std::invalid_argument("gan defense: no malware in training data");
  }
  std::vector<double> dist(train.size(), 0.0);
  for (std::size_t i : malware) {
    dist[i] = disc.margin_distance(train.samples[i].features);
  }
  std::stable_sort(malware.begin(), malware.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (dist[a] != dist[b]) return dist[a] < dist[b];
                     return train.samples[a].id < train.samples[b].id;
                   });
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(malware_fraction * malware.size() - 1e-9)));
  malware.resize(std::min(keep, malware.size()));

  // candidate flips: benign-typical features, heaviest first, lambda-sized
  std::vector<std::size_t> pos(ranking.size());
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
  std::vector<double> weight(ranking.size());
  for (std::size_t i = 0; i < weight.size(); ++i) {
    weight[i] = ranking.scores[i] * std::max(ranking.benign_bias[i], 0.0);
  }
  std::stable_sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
    if (weight[a] != weight[b]) return weight[a] > weight[b];
    return ranking.order[a] < ranking.order[b];
  });
  const auto n_candidates = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(lambda_percent * ranking.size() / 100.0 - 1e-9)));
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < std::min(n_candidates, pos.size()); ++i) {
    candidates.push_back(ranking.order[pos[i]]);
  }

  GanDefenseResult result;
  std::vector<std::optional<SyntheticSample>> produced(malware.size());
  parallel_for(malware.size(), [&](std::size_t i) {
    const Sample& origin = train.samples[malware[i]];
    SyntheticSample synth;
    synth.original_id = origin.id;
    synth.x = origin.features;
    bool fooled = disc.score(synth.x) <= 0.0;
    for (std::size_t f : candidates) {
      if (fooled) break;
      if (synth.x[f]) continue;
      synth.x[f] = 1;
      synth.delta.push_back(f);
      fooled = disc.score(synth.x) <= 0.0;
    }
    if (fooled) produced[i] = std::move(synth);
  });
  for (auto& p : produced) {
    if (p) result.synthetic.samples.push_back(std::move(*p));
  }

  // 80/20 split of the synthetic set: 80% joins retraining, 20% joins the
  // evaluation side
  const std::size_t n_synth = result.synthetic.samples.size();
  std::vector<std::size_t> perm(n_synth);
  for (std::size_t i = 0; i < n_synth; ++i) perm[i] = i;
  Rng split_rng(derive_seed(seed, "synth_split"));
  split_rng.shuffle(perm);
  const auto n_retrain =
      static_cast<std::size_t>(std::llround(0.8 * n_synth));

  Dataset retrain_set;
  retrain_set.vocabulary = train.vocabulary;
  retrain_set.samples = train.samples;
  Dataset eval_set;
  eval_set.vocabulary = poisoned_eval.vocabulary;
  eval_set.samples = poisoned_eval.samples;
  for (std::size_t i = 0; i < n_synth; ++i) {
    const auto& synth = result.synthetic.samples[perm[i]];
    Sample s;
    s.id = synth.original_id + "#syn";
    s.label = 1;  // corrected label despite fooling the discriminator
    s.features = synth.x;
    if (i < n_retrain) {
      result.retrain_ids.push_back(s.id);
      retrain_set.samples.push_back(std::move(s));
    } else {
      result.holdout_ids.push_back(s.id);
      eval_set.samples.push_back(std::move(s));
    }
  }

  TrainConfig retrain_cfg = cfg;
  retrain_cfg.seed = derive_seed(seed, "retrain");
  result.report.model_new =
      train_model(victim->kind(), retrain_set, retrain_cfg);
  result.report.pre_metrics = evaluate_model(*victim, eval_set);
  result.report.post_metrics =
      evaluate_model(*result.report.model_new, eval_set);
  result.report.synthetic_count = n_synth;
  return result;
}

}  // namespace evade
