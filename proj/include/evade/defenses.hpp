#pragma once

#include "evade/attacks.hpp"
#include "evade/metrics.hpp"

namespace evade {

struct SyntheticSample {
  std::string original_id;
  BitVec x;
  std::vector<std::size_t> delta;  // flips that fooled the discriminator
};

// Generator output of the GAN-style defense. Every sample was classified
// benign by the generation-time discriminator but is labeled malware when
// folded into retraining.
struct SyntheticSet {
  std::vector<SyntheticSample> samples;
};

struct DefenseReport {
  ClassifierHandle model_new;
  MetricsReport pre_metrics;   // victim on the poisoned evaluation set
  MetricsReport post_metrics;  // retrained model on the same set
  std::size_t synthetic_count = 0;
};

// Retrains on an independent 60% draw of the original training data plus a
// 60% draw of the crafted samples (malware-labeled). The retrained model is
// a fresh random forest.
DefenseReport adversarial_training(const Dataset& train,
                                   const AdversarialSet& adversarial,
                                   ClassifierHandle victim,
                                   const Dataset& poisoned_eval,
                                   const TrainConfig& cfg, std::uint64_t seed);

struct GanDefenseResult {
  DefenseReport report;
  SyntheticSet synthetic;
  // Id lists of the 80/20 retrain/holdout partition of the synthetic set.
  std::vector<std::string> retrain_ids;
  std::vector<std::string> holdout_ids;
};

// Generator/discriminator loop: LR discriminator, Lesslikely = the
// malware_fraction of training malware nearest the boundary, deterministic
// descending-rank benign-feature flips (candidate pool sized by
// lambda_percent) until the discriminator is fooled. Retrains the victim's
// kind on train + 80% of the synthetic set; the held-out 20% augments the
// evaluation set for both pre and post metrics.
GanDefenseResult gan_defense(const Dataset& train,
                             const FeatureRanking& ranking,
                             double lambda_percent, double malware_fraction,
                             ClassifierHandle victim,
                             const Dataset& poisoned_eval,
                             const TrainConfig& cfg, std::uint64_t seed);

// Benign test samples plus every crafted sample (malware-labeled); the
// evaluation set both defenses report against.
Dataset make_poisoned_eval(const Dataset& test,
                           const AdversarialSet& adversarial);

}  // namespace evade
