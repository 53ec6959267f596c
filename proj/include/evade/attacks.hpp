#pragma once

#include "evade/mlp.hpp"
#include "evade/model.hpp"
#include "evade/ranking.hpp"

namespace evade {

// White-box attacker knowledge: data, working subspace, victim model.
struct AttackContext {
  const Dataset* train = nullptr;  // attacker's copy of the training split
  const Dataset* test = nullptr;   // malware here gets crafted
  const FeatureRanking* ranking = nullptr;  // working subspace
  ClassifierHandle model;
  int target_label = 0;  // benign
};

struct AcoParams {
  std::size_t max_iter = 1000;
  double evaporation = 0.1;
  double deposit = 0.99;
  std::size_t n_ants = 20;
  std::size_t max_variables = 300;
  // Acceptance band around the boundary; <0 means "use the sample's own
  // starting distance".
  double threshold = -1.0;
  // Iterations without progress before the flip-set cardinality grows.
  std::size_t cardinality_stall = 5;
};

struct AttackConfig {
  double lambda_percent = 10.0;
  std::size_t k = 10;              // KNN neighbors
  double malware_fraction = 0.1;   // share of malware selected (lr, aco, knn)
  AcoParams aco;
  std::size_t jsma_max_mods = 20;
  std::uint64_t seed = 0;
};

struct AdversarialSample {
  std::string original_id;
  BitVec x_star;
  int y_star = 0;
  std::vector<std::size_t> delta;  // flipped feature indices, ascending
  bool evaded = false;
};

struct AdversarialSet {
  std::string scenario;
  std::vector<AdversarialSample> samples;
  AttackConfig config;

  std::size_t evaded_count() const;
  double evasion_rate() const;
};

// Walks `candidates` in order, flipping each zero-valued feature to 1 and
// re-querying the model after every flip; stops at the first benign verdict
// or when candidates run out. All flips performed stay in delta.
AdversarialSample flip_until_evasion(const Sample& x,
                                     const std::vector<std::size_t>& candidates,
                                     const Classifier& model, int y_star);

AdversarialSet attack_trivial(const AttackContext& ctx,
                              const AttackConfig& cfg);
AdversarialSet attack_distribution(const AttackContext& ctx,
                                   const AttackConfig& cfg);
AdversarialSet attack_knn(const AttackContext& ctx, const AttackConfig& cfg);
AdversarialSet attack_lr(const AttackContext& ctx, const AttackConfig& cfg);
AdversarialSet attack_aco(const AttackContext& ctx, const AttackConfig& cfg);
AdversarialSet attack_jsma(const AttackContext& ctx, const AttackConfig& cfg);

// Dispatch by scenario name {trivial,distribution,knn,lr,aco,jsma}.
AdversarialSet run_attack(const std::string& scenario,
                          const AttackContext& ctx, const AttackConfig& cfg);

std::array<double, 2> jsma_softmax(double logit0, double logit1);
std::vector<std::array<double, 2>> jsma_jacobian(const MlpModel& net,
                                                 const BitVec& x);

struct JsmaPick {
  std::size_t index = 0;
  bool positive_gradient = false;  // false: best available was <= 0
};
// Argmax of the benign-class gradient over still-zero features, ties to
// lower index. Throws if no zero-valued feature remains.
JsmaPick jsma_select_index(const std::vector<std::array<double, 2>>& jacobian,
                           const BitVec& x);

// Fraction of crafted samples the model assigns the target label.
double evaluate_objective(const AdversarialSet& advset,
                          const Classifier& model);

// JSONL: {"original_id": ..., "flipped": [...], "evaded": ...} per line.
void save_adversarial(const AdversarialSet& advset, const std::string& path);
// Rebuilds x_star vectors by re-applying flips to the matching originals.
AdversarialSet load_adversarial(const std::string& path, const Dataset& data);

}  // namespace evade
