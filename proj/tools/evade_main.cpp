#include <cstdio>
#include <exception>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "evade/attacks.hpp"
#include "evade/dataset.hpp"
#include "evade/defenses.hpp"
#include "evade/metrics.hpp"
#include "evade/ranking.hpp"
#include "evade/runner.hpp"
#include "evade/serialize.hpp"

namespace {

using namespace evade;

Dataset load_data(const std::string& path, const std::string& vocab_path,
                  bool report_dropped = true) {
  std::shared_ptr<const FeatureVocabulary> vocab;
  if (!vocab_path.empty()) vocab = load_vocabulary(vocab_path);
  LoadResult loaded = load_dataset(path, vocab);
  if (report_dropped && !loaded.unknown_dropped.empty()) {
    std::size_t occurrences = 0;
    for (const auto& [name, n] : loaded.unknown_dropped) occurrences += n;
    std::fprintf(stderr,
                 "%s: dropped %zu unknown feature name(s), %zu occurrence(s)\n",
                 path.c_str(), loaded.unknown_dropped.size(), occurrences);
  }
  return std::move(loaded.dataset);
}

void warn_if_single_class(const Dataset& data, const char* what) {
  if (data.count_label(0) == 0 || data.count_label(1) == 0) {
    std::fprintf(stderr, "warning: %s contains a single class only\n", what);
  }
}

void print_dataset_summary(const Dataset& data) {
  std::printf("samples=%zu benign=%zu malware=%zu features=%zu\n", data.size(),
              data.count_label(0), data.count_label(1), data.dim());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evasion-attack pipeline for binary static-feature classifiers"};
  app.require_subcommand(1);

  // ---- ingest ----
  std::string in_path, vocab_path, out_path, vocab_out;
  auto* ingest = app.add_subcommand("ingest", "normalize a JSONL dataset");
  ingest->add_option("--input", in_path, "JSONL dataset")->required();
  ingest->add_option("--vocab", vocab_path, "fixed vocabulary file");
  ingest->add_option("--out", out_path, "normalized JSONL output")->required();
  ingest->add_option("--vocab-out", vocab_out, "write the vocabulary used");
  ingest->callback([&] {
    Dataset data = load_data(in_path, vocab_path);
    save_dataset(data, out_path);
    if (!vocab_out.empty()) save_vocabulary(*data.vocabulary, vocab_out);
    print_dataset_summary(data);
  });

  // ---- synth ----
  SyntheticConfig synth_cfg;
  std::string mask_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--n", synth_cfg.n_samples, "sample count");
  synth->add_option("--m", synth_cfg.n_features, "feature count");
  synth->add_option("--signal", synth_cfg.n_signal,
                    "discriminative columns (split across both classes)");
  synth->add_option("--noise", synth_cfg.flip_noise, "signal disobedience rate");
  synth->add_option("--malware-fraction", synth_cfg.malware_fraction,
                    "share of malware samples");
  synth->add_option("--background", synth_cfg.background_density,
                    "off-signal bit density");
  synth->add_option("--seed", synth_cfg.seed, "generator seed");
  synth->add_option("--out", out_path, "JSONL output")->required();
  synth->add_option("--vocab-out", vocab_out, "write the vocabulary");
  synth->add_option("--mask-out", mask_out, "write ground-truth signal columns");
  synth->callback([&] {
    SyntheticResult result = generate_synthetic(synth_cfg);
    save_dataset(result.dataset, out_path);
    if (!vocab_out.empty()) {
      save_vocabulary(*result.dataset.vocabulary, vocab_out);
    }
    if (!mask_out.empty()) {
      std::FILE* f = std::fopen(mask_out.c_str(), "w");
      if (!f) throw std::runtime_error("cannot open " + mask_out);
      std::fprintf(f, "{\"benign_signal\": [");
      for (std::size_t i = 0; i < result.benign_signal.size(); ++i) {
        std::fprintf(f, "%s%zu", i ? ", " : "", result.benign_signal[i]);
      }
      std::fprintf(f, "], \"malware_signal\": [");
      for (std::size_t i = 0; i < result.malware_signal.size(); ++i) {
        std::fprintf(f, "%s%zu", i ? ", " : "", result.malware_signal[i]);
      }
      std::fprintf(f, "]}\n");
      std::fclose(f);
    }
    print_dataset_summary(result.dataset);
  });

  // ---- rank ----
  std::string train_path;
  std::size_t top = 300, rank_trees = 100;
  std::uint64_t seed = 0;
  auto* rank = app.add_subcommand("rank", "feature importance ranking");
  rank->add_option("--train", train_path, "training JSONL")->required();
  rank->add_option("--vocab", vocab_path, "fixed vocabulary file");
  rank->add_option("--top", top, "subspace size to keep");
  rank->add_option("--trees", rank_trees, "ranking-forest size");
  rank->add_option("--seed", seed, "ranking seed");
  rank->add_option("--out", out_path, "ranking JSON output")->required();
  rank->callback([&] {
    const Dataset train = load_data(train_path, vocab_path);
    const FeatureRanking ranking =
        select_top(rank_features(train, rank_trees, seed), top);
    save_ranking(ranking, out_path);
    std::printf("ranked %zu of %zu features\n", ranking.size(), train.dim());
  });

  // ---- train ----
  std::string algo = "rf";
  TrainConfig train_cfg;
  auto* train = app.add_subcommand("train", "fit a classifier");
  train->add_option("--algo", algo, "rf|bagging|svm|logreg|mlp|tree");
  train->add_option("--train", train_path, "training JSONL")->required();
  train->add_option("--vocab", vocab_path, "fixed vocabulary file");
  train->add_option("--seed", train_cfg.seed, "training seed");
  train->add_option("--trees", train_cfg.n_trees, "ensemble size");
  train->add_option("--max-depth", train_cfg.max_depth, "tree depth cap");
  train->add_option("--min-leaf", train_cfg.min_leaf, "min samples per leaf");
  train->add_option("--split-features", train_cfg.max_split_features,
                    "candidate features per split (0 = all)");
  train->add_option("--lr", train_cfg.learning_rate, "base learning rate");
  train->add_option("--epochs", train_cfg.epochs, "training epochs");
  train->add_option("--batch", train_cfg.batch_size, "mini-batch size");
  train->add_option("--reg", train_cfg.regularization, "L2 coefficient");
  train->add_option("--hidden", train_cfg.hidden_units, "MLP hidden width");
  train->add_option("--out", out_path, "model output")->required();
  train->callback([&] {
    const Dataset data = load_data(train_path, vocab_path);
    warn_if_single_class(data, "training data");
    const ModelKind kind = model_kind_from_string(algo);
    ClassifierHandle model = train_model(kind, data, train_cfg);
    save_model(*model, train_cfg, out_path);
    const MetricsReport fit = evaluate_model(*model, data);
    std::printf("trained %s on %zu samples, train accuracy %.4f\n",
                to_string(kind).c_str(), data.size(),
                fit.accuracy.value_or(0.0));
  });

  // ---- attack ----
  std::string scenario, model_path, ranking_path, attack_train_path;
  AttackConfig attack_cfg;
  auto* attack = app.add_subcommand("attack", "craft adversarial samples");
  attack->add_option("--scenario", scenario,
                     "trivial|distribution|knn|lr|aco|jsma")
      ->required();
  attack->add_option("--model", model_path, "victim model")->required();
  attack->add_option("--data", in_path, "JSONL whose malware gets crafted")
      ->required();
  attack->add_option("--train", attack_train_path,
                     "attacker's training-data copy (defaults to --data)");
  attack->add_option("--vocab", vocab_path, "fixed vocabulary file");
  attack->add_option("--ranking", ranking_path, "ranking JSON")->required();
  attack->add_option("--lambda", attack_cfg.lambda_percent,
                     "% of the subspace available to flips");
  attack->add_option("--k", attack_cfg.k, "KNN neighbor count");
  attack->add_option("--fraction", attack_cfg.malware_fraction,
                     "share of malware selected (knn, lr, aco)");
  attack->add_option("--jsma-mods", attack_cfg.jsma_max_mods,
                     "JSMA flip budget");
  attack->add_option("--aco-iters", attack_cfg.aco.max_iter, "ACO iterations");
  attack->add_option("--aco-ants", attack_cfg.aco.n_ants, "ACO colony size");
  attack->add_option("--seed", attack_cfg.seed, "attack seed");
  attack->add_option("--out", out_path, "adversarial JSONL output")->required();
  attack->callback([&] {
    const SavedModel saved = load_model(model_path);
    const Dataset data = load_data(in_path, vocab_path);
    Dataset attacker_train;
    if (!attack_train_path.empty()) {
      attacker_train = load_data(attack_train_path, vocab_path);
    }
    const Dataset& train_ref =
        attack_train_path.empty() ? data : attacker_train;
    const FeatureRanking ranking = load_ranking(ranking_path);
    AttackContext ctx{&train_ref, &data, &ranking, saved.model, 0};
    const AdversarialSet advset = run_attack(scenario, ctx, attack_cfg);
    save_adversarial(advset, out_path);
    std::printf("%s: crafted %zu sample(s), %zu evaded (rate %.4f)\n",
                scenario.c_str(), advset.samples.size(), advset.evaded_count(),
                advset.evasion_rate());
  });

  // ---- defend ----
  std::string method, adv_path, report_path, eval_path;
  double defend_lambda = 10.0, defend_fraction = 0.1;
  auto* defend = app.add_subcommand("defend", "retrain against an attack");
  defend->add_option("--method", method, "adversarial-training|gan")
      ->required();
  defend->add_option("--model", model_path, "victim model")->required();
  defend->add_option("--train", train_path, "training JSONL")->required();
  defend->add_option("--data", eval_path,
                     "evaluation JSONL the adversarial file was crafted from")
      ->required();
  defend->add_option("--vocab", vocab_path, "fixed vocabulary file");
  defend->add_option("--adv", adv_path, "adversarial JSONL")->required();
  defend->add_option("--ranking", ranking_path, "ranking JSON (gan)");
  defend->add_option("--lambda", defend_lambda, "generator candidate % (gan)");
  defend->add_option("--fraction", defend_fraction,
                     "Lesslikely malware share (gan)");
  defend->add_option("--seed", seed, "defense seed");
  defend->add_option("--out", out_path, "retrained model output")->required();
  defend->add_option("--report", report_path, "metrics JSON output");
  defend->callback([&] {
    const SavedModel saved = load_model(model_path);
    const Dataset train_data = load_data(train_path, vocab_path);
    const Dataset eval_data = load_data(eval_path, vocab_path);
    const AdversarialSet advset = load_adversarial(adv_path, eval_data);
    const Dataset poisoned = make_poisoned_eval(eval_data, advset);

    DefenseReport report;
    std::size_t synthetic_count = 0;
    if (method == "adversarial-training") {
      report = adversarial_training(train_data, advset, saved.model, poisoned,
                                    saved.config, seed);
    } else if (method == "gan") {
      if (ranking_path.empty()) {
        throw CLI::ValidationError("--ranking is required for --method gan");
      }
      const FeatureRanking ranking = load_ranking(ranking_path);
      GanDefenseResult gan =
          gan_defense(train_data, ranking, defend_lambda, defend_fraction,
                      saved.model, poisoned, saved.config, seed);
      report = std::move(gan.report);
      synthetic_count = report.synthetic_count;
    } else {
      throw CLI::ValidationError("unknown method \"" + method + "\"");
    }

    save_model(*report.model_new, saved.config, out_path);
    if (!report_path.empty()) {
      std::FILE* f = std::fopen(report_path.c_str(), "w");
      if (!f) throw std::runtime_error("cannot open " + report_path);
      std::fprintf(f,
                   "{\n  \"method\": \"%s\",\n  \"synthetic_count\": %zu,\n"
                   "  \"pre\": %s,\n  \"post\": %s\n}\n",
                   method.c_str(), synthetic_count,
                   metrics_json(report.pre_metrics).c_str(),
                   metrics_json(report.post_metrics).c_str());
      std::fclose(f);
    }
    std::printf("%s: accuracy %.4f -> %.4f on the poisoned evaluation set\n",
                method.c_str(), report.pre_metrics.accuracy.value_or(0.0),
                report.post_metrics.accuracy.value_or(0.0));
  });

  // ---- experiment ----
  std::string config_path, out_dir_override;
  auto* experiment = app.add_subcommand("experiment", "run a full sweep");
  experiment->add_option("--config", config_path, "key = value config file")
      ->required();
  experiment->add_option("--out", out_dir_override, "override the output dir");
  experiment->callback([&] {
    ExperimentConfig cfg = load_experiment_config(config_path);
    if (!out_dir_override.empty()) cfg.output_dir = out_dir_override;
    const RunReport report = run_experiment(cfg);
    emit_report(report, cfg.output_dir);
    std::size_t failed = 0;
    for (const auto& c : report.cells) failed += c.failed ? 1 : 0;
    std::printf("%zu cell(s), %zu failed; reports in %s\n",
                report.cells.size(), failed, cfg.output_dir.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
