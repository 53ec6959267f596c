#pragma once

#include "evade/attacks.hpp"
#include "evade/dataset.hpp"
#include "evade/metrics.hpp"
#include "evade/model.hpp"

namespace evade {

struct ExperimentConfig {
  // Either a dataset file or (when empty) the synthetic generator below.
  std::string dataset_path;
  std::string vocabulary_path;
  SyntheticConfig synth;

  std::vector<ModelKind> classifiers = {ModelKind::forest, ModelKind::bagging,
                                        ModelKind::svm};
  std::vector<std::string> scenarios = {"trivial", "distribution", "knn",
                                        "lr",      "aco",          "jsma"};
  std::vector<double> lambdas = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 20};
  std::size_t repetitions = 10;
  std::uint64_t master_seed = 1;
  std::string output_dir = "results";
  std::size_t top_features = 300;
  bool run_defenses = true;
  std::string eval_mode = "split";  // "split" or "cv10"

  TrainConfig train;        // victim-classifier knobs
  std::size_t mlp_epochs = 30;  // the network trains far slower; own budget
  AttackConfig attack;      // k, selection fraction, ACO, JSMA knobs
};

// One grid cell: victim classifier x scenario x lambda x repetition.
// The clean baseline rides along in every cell of its repetition.
struct CellResult {
  std::string classifier;
  std::string scenario;
  double lambda_percent = 0.0;
  std::size_t repetition = 0;

  bool failed = false;
  std::string error;

  double evasion_rate = 0.0;  // crafted samples the victim calls benign
  MetricsReport baseline;     // victim on the clean test split
  MetricsReport attacked;     // victim on benign test + crafted samples
  std::optional<MetricsReport> post_adv_training;
  std::optional<MetricsReport> post_gan;
  std::size_t synthetic_count = 0;

  double train_seconds = 0.0;
  double test_seconds = 0.0;
  double poison_seconds = 0.0;
  double defense_at_seconds = 0.0;
  double defense_gan_seconds = 0.0;
};

struct CvFoldResult {
  std::string classifier;
  std::size_t fold = 0;
  MetricsReport metrics;
};

struct RunReport {
  ExperimentConfig config;
  std::size_t subspace_size = 0;  // ranked features the attacks draw from
  std::vector<CellResult> cells;
  std::vector<CvFoldResult> cv_folds;  // eval_mode == "cv10" only
};

// Full protocol per repetition: fresh split, rank, train victims, craft
// every scenario at every lambda, run both defenses, evaluate. A failing
// cell is recorded and skipped, it never aborts the run.
RunReport run_experiment(const ExperimentConfig& cfg);

// The lambda sweep is run_experiment over cfg.lambdas; kept as its own
// entry point for symmetry with the report shapes.
RunReport sweep_lambda(const ExperimentConfig& cfg);

// Writes cells.csv, summary.csv, fpr_lambda.csv, table_fpr_by_count.csv,
// timings.csv, table_timings.csv and report.json into dir. Everything
// except the two timing files is byte-deterministic for a fixed seed.
void emit_report(const RunReport& report, const std::string& dir);

ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace evade
