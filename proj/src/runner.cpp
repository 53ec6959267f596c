#include "evade/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "evade/defenses.hpp"
#include "evade/ranking.hpp"
#include "evade/rng.hpp"

namespace evade {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t lambda_key(double lambda) {
  return static_cast<std::uint64_t>(std::llround(lambda * 1000.0));
}

Dataset load_input(const ExperimentConfig& cfg) {
  if (!cfg.dataset_path.empty()) {
    std::shared_ptr<const FeatureVocabulary> vocab;
    if (!cfg.vocabulary_path.empty()) {
      vocab = load_vocabulary(cfg.vocabulary_path);
    }
    return load_dataset(cfg.dataset_path, vocab).dataset;
  }
  SyntheticConfig synth = cfg.synth;
  synth.seed = derive_seed(cfg.master_seed, "data");
  return generate_synthetic(synth).dataset;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (cfg.lambdas.empty()) throw std::invalid_argument("no lambda values");
  for (double l : cfg.lambdas) {
    if (l <= 0.0 || l > 100.0) {
      throw std::invalid_argument("lambda values must be in (0, 100]");
    }
  }
  if (cfg.classifiers.empty()) throw std::invalid_argument("no classifiers");
  static const std::set<std::string> known{"trivial", "distribution", "knn",
                                          "lr",      "aco",          "jsma"};
  for (const auto& s : cfg.scenarios) {
    if (!known.count(s)) throw std::invalid_argument("unknown scenario: " + s);
  }
  if (cfg.eval_mode != "split" && cfg.eval_mode != "cv10") {
    throw std::invalid_argument("eval mode must be split or cv10");
  }
  if (cfg.top_features < 1) throw std::invalid_argument("top_features must be >= 1");
}

void run_cv10(const Dataset& data, const ExperimentConfig& cfg,
              RunReport& report) {
  constexpr std::size_t kFolds = 10;
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < data.size(); ++i) {
    by_class[data.samples[i].label].push_back(i);
  }
  std::vector<std::size_t> fold_of(data.size(), 0);
  for (int label : {0, 1}) {
    Rng rng(derive_seed(cfg.master_seed, "cv_fold",
                        static_cast<std::uint64_t>(label)));
    rng.shuffle(by_class[label]);
    for (std::size_t i = 0; i < by_class[label].size(); ++i) {
      fold_of[by_class[label][i]] = i % kFolds;
    }
  }

  for (std::size_t fold = 0; fold < kFolds; ++fold) {
    Dataset train, eval;
    train.vocabulary = data.vocabulary;
    eval.vocabulary = data.vocabulary;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (fold_of[i] == fold ? eval : train).samples.push_back(data.samples[i]);
    }
    for (ModelKind kind : cfg.classifiers) {
      TrainConfig tc = cfg.train;
      if (kind == ModelKind::mlp) tc.epochs = cfg.mlp_epochs;
      tc.seed = derive_seed(cfg.master_seed, "cv_train_" + to_string(kind), fold);
      CvFoldResult result;
      result.classifier = to_string(kind);
      result.fold = fold;
      result.metrics = evaluate_model(*train_model(kind, train, tc), eval);
      report.cv_folds.push_back(std::move(result));
    }
  }
}

struct VictimState {
  ClassifierHandle model;
  MetricsReport baseline;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
};

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  RunReport report;
  report.config = cfg;
  const Dataset data = load_input(cfg);

  if (cfg.eval_mode == "cv10") {
    run_cv10(data, cfg, report);
    return report;
  }

  const bool want_jsma =
      std::find(cfg.scenarios.begin(), cfg.scenarios.end(), "jsma") !=
      cfg.scenarios.end();

  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.master_seed, "rep", rep);
    const SplitResult split =
        split_dataset(data, 0.6, 0.2, 0.2, derive_seed(rep_seed, "split"));
    const FeatureRanking ranking = select_top(
        rank_features(split.train, 100, derive_seed(rep_seed, "rank")),
        cfg.top_features);
    report.subspace_size = ranking.size();

    std::map<ModelKind, VictimState> victims;
    for (ModelKind kind : cfg.classifiers) {
      VictimState state;
      TrainConfig tc = cfg.train;
      if (kind == ModelKind::mlp) tc.epochs = cfg.mlp_epochs;
      tc.seed = derive_seed(rep_seed, "train_" + to_string(kind));
      auto t0 = Clock::now();
      state.model = train_model(kind, split.train, tc);
      state.train_seconds = seconds_since(t0);
      t0 = Clock::now();
      state.baseline = evaluate_model(*state.model, split.test);
      state.test_seconds = seconds_since(t0);
      victims.emplace(kind, std::move(state));
    }

    // JSMA always crafts against the network; build one per repetition and
    // share it (and its sample set) across victim rows.
    std::shared_ptr<const MlpClassifier> mlp;
    AdversarialSet jsma_set;
    double jsma_seconds = 0.0;
    if (want_jsma) {
      if (auto it = victims.find(ModelKind::mlp); it != victims.end()) {
        mlp = std::dynamic_pointer_cast<const MlpClassifier>(it->second.model);
      }
      if (!mlp) {
        TrainConfig tc = cfg.train;
        tc.epochs = cfg.mlp_epochs;
        tc.seed = derive_seed(rep_seed, "train_mlp");
        mlp = train_mlp(split.train, tc);
      }
      AttackConfig acfg = cfg.attack;
      acfg.seed = derive_seed(rep_seed, "attack_jsma");
      AttackContext ctx{&split.train, &split.test, &ranking, mlp, 0};
      const auto t0 = Clock::now();
      jsma_set = attack_jsma(ctx, acfg);
      jsma_seconds = seconds_since(t0);
    }

    for (ModelKind kind : cfg.classifiers) {
      const VictimState& victim = victims.at(kind);
      const std::string kind_name = to_string(kind);

      for (const auto& scenario : cfg.scenarios) {
        for (double lambda : cfg.lambdas) {
          CellResult cell;
          cell.classifier = kind_name;
          cell.scenario = scenario;
          cell.lambda_percent = lambda;
          cell.repetition = rep;
          cell.baseline = victim.baseline;
          cell.train_seconds = victim.train_seconds;
          try {
            AttackConfig acfg = cfg.attack;
            acfg.lambda_percent = lambda;
            acfg.seed = derive_seed(
                rep_seed, "attack_" + scenario + "_" + kind_name,
                lambda_key(lambda));

            AdversarialSet advset;
            if (scenario == "jsma") {
              advset = jsma_set;
              cell.poison_seconds = jsma_seconds;
            } else {
              AttackContext ctx{&split.train, &split.test, &ranking,
                                victim.model, 0};
              const auto t0 = Clock::now();
              advset = run_attack(scenario, ctx, acfg);
              cell.poison_seconds = seconds_since(t0);
            }

            cell.evasion_rate = evaluate_objective(advset, *victim.model);
            const Dataset poisoned = make_poisoned_eval(split.test, advset);
            cell.attacked = evaluate_model(*victim.model, poisoned);

            if (cfg.run_defenses) {
              TrainConfig dc = cfg.train;
              if (kind == ModelKind::mlp) dc.epochs = cfg.mlp_epochs;
              auto t0 = Clock::now();
              const DefenseReport at = adversarial_training(
                  split.train, advset, victim.model, poisoned, cfg.train,
                  derive_seed(rep_seed,
                              "defense_at_" + scenario + "_" + kind_name,
                              lambda_key(lambda)));
              cell.defense_at_seconds = seconds_since(t0);
              cell.post_adv_training = at.post_metrics;

              t0 = Clock::now();
              const GanDefenseResult gan = gan_defense(
                  split.train, ranking, lambda, cfg.attack.malware_fraction,
                  victim.model, poisoned, dc,
                  derive_seed(rep_seed,
                              "defense_gan_" + scenario + "_" + kind_name,
                              lambda_key(lambda)));
              cell.defense_gan_seconds = seconds_since(t0);
              cell.post_gan = gan.report.post_metrics;
              cell.synthetic_count = gan.report.synthetic_count;
            }
          } catch (const std::exception& e) {
            cell.failed = true;
            cell.error = e.what();
          }
          report.cells.push_back(std::move(cell));
        }
      }
    }
  }
  return report;
}

RunReport sweep_lambda(const ExperimentConfig& cfg) { return run_experiment(cfg); }

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

std::string metric_header(const std::string& prefix) {
  std::ostringstream out;
  std::istringstream in(kMetricColumns);
  std::string col;
  bool first = true;
  while (std::getline(in, col, ',')) {
    if (!first) out << ',';
    out << prefix << '_' << col;
    first = false;
  }
  return out.str();
}

std::string metric_cells(const MetricsReport& m) { return metrics_csv_row(m); }

std::string empty_metric_cells() { return ",,,,,,"; }

// Mean over present values; absent when no cell carries one.
class Averager {
 public:
  void add(const std::optional<double>& v) {
    if (v) {
      sum_ += *v;
      ++n_;
    }
  }
  void add(double v) { add(std::optional<double>(v)); }
  std::optional<double> mean() const {
    if (n_ == 0) return std::nullopt;
    return sum_ / n_;
  }

 private:
  double sum_ = 0.0;
  std::size_t n_ = 0;
};

struct GroupKey {
  std::string classifier;
  std::string scenario;
  double lambda;
  bool operator<(const GroupKey& o) const {
    if (classifier != o.classifier) return classifier < o.classifier;
    if (scenario != o.scenario) return scenario < o.scenario;
    return lambda < o.lambda;
  }
};

nlohmann::json metrics_to_json(const MetricsReport& m) {
  return nlohmann::json::parse(metrics_json(m));
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["dataset"] = cfg.dataset_path;
  j["vocabulary"] = cfg.vocabulary_path;
  j["synthetic"] = {{"n", cfg.synth.n_samples},
                    {"m", cfg.synth.n_features},
                    {"signal", cfg.synth.n_signal},
                    {"malware_fraction", cfg.synth.malware_fraction},
                    {"flip_noise", cfg.synth.flip_noise},
                    {"background_density", cfg.synth.background_density}};
  std::vector<std::string> kinds;
  for (auto k : cfg.classifiers) kinds.push_back(to_string(k));
  j["classifiers"] = kinds;
  j["scenarios"] = cfg.scenarios;
  j["lambdas"] = cfg.lambdas;
  j["repetitions"] = cfg.repetitions;
  j["seed"] = cfg.master_seed;
  j["top_features"] = cfg.top_features;
  j["defenses"] = cfg.run_defenses;
  j["eval"] = cfg.eval_mode;
  j["train"] = {{"n_trees", cfg.train.n_trees},
                {"max_split_features", cfg.train.max_split_features},
                {"max_depth", cfg.train.max_depth},
                {"min_leaf", cfg.train.min_leaf},
                {"learning_rate", cfg.train.learning_rate},
                {"epochs", cfg.train.epochs},
                {"batch_size", cfg.train.batch_size},
                {"regularization", cfg.train.regularization},
                {"mlp_epochs", cfg.mlp_epochs},
                {"hidden_units", cfg.train.hidden_units}};
  j["attack"] = {{"k", cfg.attack.k},
                 {"malware_fraction", cfg.attack.malware_fraction},
                 {"jsma_max_mods", cfg.attack.jsma_max_mods},
                 {"aco",
                  {{"max_iter", cfg.attack.aco.max_iter},
                   {"evaporation", cfg.attack.aco.evaporation},
                   {"deposit", cfg.attack.aco.deposit},
                   {"n_ants", cfg.attack.aco.n_ants},
                   {"max_variables", cfg.attack.aco.max_variables},
                   {"threshold", cfg.attack.aco.threshold},
                   {"cardinality_stall", cfg.attack.aco.cardinality_stall}}}};
  return j;
}

}  // namespace

void emit_report(const RunReport& report, const std::string& dir) {
  fs::create_directories(dir);

  {
    std::ofstream out(fs::path(dir) / "cells.csv");
    out << "classifier,scenario,lambda,repetition,failed,error,evasion_rate,"
        << "synthetic_count," << metric_header("baseline") << ','
        << metric_header("attacked") << ',' << metric_header("adv_retrain")
        << ',' << metric_header("gan_retrain") << '\n';
    for (const auto& c : report.cells) {
      out << c.classifier << ',' << c.scenario << ',' << fmt(c.lambda_percent)
          << ',' << c.repetition << ',' << (c.failed ? 1 : 0) << ','
          << csv_escape(c.error) << ',' << fmt(c.evasion_rate) << ','
          << c.synthetic_count << ',' << metric_cells(c.baseline) << ','
          << (c.failed ? empty_metric_cells() : metric_cells(c.attacked))
          << ','
          << (c.post_adv_training ? metric_cells(*c.post_adv_training)
                                  : empty_metric_cells())
          << ','
          << (c.post_gan ? metric_cells(*c.post_gan) : empty_metric_cells())
          << '\n';
    }
  }

  std::map<GroupKey, std::vector<const CellResult*>> groups;
  for (const auto& c : report.cells) {
    groups[{c.classifier, c.scenario, c.lambda_percent}].push_back(&c);
  }

  {
    std::ofstream out(fs::path(dir) / "summary.csv");
    out << "classifier,scenario,lambda,n_ok,n_failed,evasion_rate,"
        << metric_header("baseline") << ',' << metric_header("attacked") << ','
        << metric_header("adv_retrain") << ',' << metric_header("gan_retrain")
        << '\n';
    for (const auto& [key, cells] : groups) {
      std::size_t n_failed = 0;
      Averager evasion;
      Averager base[7], att[7], at[7], gan[7];
      auto add_block = [](Averager* block, const MetricsReport& m) {
        block[0].add(m.accuracy);
        block[1].add(m.fpr_paper);
        block[2].add(m.fpr_standard);
        block[3].add(m.precision);
        block[4].add(m.recall);
        block[5].add(m.auc_paper);
        block[6].add(m.auc_roc);
      };
      for (const auto* c : cells) {
        if (c->failed) {
          ++n_failed;
          continue;
        }
        evasion.add(c->evasion_rate);
        add_block(base, c->baseline);
        add_block(att, c->attacked);
        if (c->post_adv_training) add_block(at, *c->post_adv_training);
        if (c->post_gan) add_block(gan, *c->post_gan);
      }
      out << key.classifier << ',' << key.scenario << ',' << fmt(key.lambda)
          << ',' << (cells.size() - n_failed) << ',' << n_failed << ','
          << fmt(evasion.mean());
      for (Averager* block : {base, att, at, gan}) {
        for (int i = 0; i < 7; ++i) out << ',' << fmt(block[i].mean());
      }
      out << '\n';
    }
  }

  {
    // series for plotting: x = lambda, y = means per scenario
    std::ofstream out(fs::path(dir) / "fpr_lambda.csv");
    out << "classifier,scenario,lambda,attacked_fpr_paper,attacked_accuracy,"
        << "evasion_rate\n";
    for (const auto& [key, cells] : groups) {
      Averager fpr, acc, evasion;
      for (const auto* c : cells) {
        if (c->failed) continue;
        fpr.add(c->attacked.fpr_paper);
        acc.add(c->attacked.accuracy);
        evasion.add(c->evasion_rate);
      }
      out << key.classifier << ',' << key.scenario << ',' << fmt(key.lambda)
          << ',' << fmt(fpr.mean()) << ',' << fmt(acc.mean()) << ','
          << fmt(evasion.mean()) << '\n';
    }
  }

  {
    // one row per scenario, one column per selected-feature count
    std::ofstream out(fs::path(dir) / "table_fpr_by_count.csv");
    std::vector<double> lambdas = report.config.lambdas;
    std::sort(lambdas.begin(), lambdas.end());
    out << "classifier,scenario";
    for (double l : lambdas) {
      const auto count = static_cast<std::size_t>(
          std::ceil(l * report.subspace_size / 100.0 - 1e-9));
      out << ",fpr_at_" << count;
    }
    out << '\n';
    std::set<std::pair<std::string, std::string>> rows;
    for (const auto& [key, cells] : groups) {
      rows.insert({key.classifier, key.scenario});
    }
    for (const auto& [classifier, scenario] : rows) {
      out << classifier << ',' << scenario;
      for (double l : lambdas) {
        auto it = groups.find({classifier, scenario, l});
        Averager fpr;
        if (it != groups.end()) {
          for (const auto* c : it->second) {
            if (!c->failed) fpr.add(c->attacked.fpr_paper);
          }
        }
        out << ',' << fmt(fpr.mean());
      }
      out << '\n';
    }
  }

  {
    std::ofstream out(fs::path(dir) / "timings.csv");
    out << "classifier,scenario,lambda,repetition,train_seconds,test_seconds,"
        << "poison_seconds,defense_at_seconds,defense_gan_seconds\n";
    for (const auto& c : report.cells) {
      out << c.classifier << ',' << c.scenario << ',' << fmt(c.lambda_percent)
          << ',' << c.repetition << ',' << fmt(c.train_seconds) << ','
          << fmt(c.test_seconds) << ',' << fmt(c.poison_seconds) << ','
          << fmt(c.defense_at_seconds) << ',' << fmt(c.defense_gan_seconds)
          << '\n';
    }
  }

  {
    // phase means per classifier x scenario, aggregated over lambda and reps
    std::ofstream out(fs::path(dir) / "table_timings.csv");
    out << "classifier,scenario,train_seconds,test_seconds,poison_seconds,"
        << "defense_at_seconds,defense_gan_seconds\n";
    std::map<std::pair<std::string, std::string>, std::array<Averager, 5>> agg;
    for (const auto& c : report.cells) {
      if (c.failed) continue;
      auto& a = agg[{c.classifier, c.scenario}];
      a[0].add(c.train_seconds);
      a[1].add(c.test_seconds);
      a[2].add(c.poison_seconds);
      a[3].add(c.defense_at_seconds);
      a[4].add(c.defense_gan_seconds);
    }
    for (const auto& [key, a] : agg) {
      out << key.first << ',' << key.second;
      for (const auto& v : a) out << ',' << fmt(v.mean());
      out << '\n';
    }
  }

  if (!report.cv_folds.empty()) {
    std::ofstream out(fs::path(dir) / "cv10.csv");
    out << "classifier,fold," << metric_header("cv") << '\n';
    for (const auto& f : report.cv_folds) {
      out << f.classifier << ',' << f.fold << ',' << metric_cells(f.metrics)
          << '\n';
    }
  }

  {
    nlohmann::json j;
    j["config"] = config_to_json(report.config);
    j["subspace_size"] = report.subspace_size;
    auto cells = nlohmann::json::array();
    for (const auto& c : report.cells) {
      nlohmann::json cj;
      cj["classifier"] = c.classifier;
      cj["scenario"] = c.scenario;
      cj["lambda"] = c.lambda_percent;
      cj["repetition"] = c.repetition;
      cj["failed"] = c.failed;
      if (c.failed) cj["error"] = c.error;
      cj["evasion_rate"] = c.evasion_rate;
      cj["synthetic_count"] = c.synthetic_count;
      cj["baseline"] = metrics_to_json(c.baseline);
      if (!c.failed) cj["attacked"] = metrics_to_json(c.attacked);
      if (c.post_adv_training) {
        cj["adv_retrain"] = metrics_to_json(*c.post_adv_training);
      }
      if (c.post_gan) cj["gan_retrain"] = metrics_to_json(*c.post_gan);
      cells.push_back(std::move(cj));
    }
    j["cells"] = std::move(cells);
    if (!report.cv_folds.empty()) {
      auto folds = nlohmann::json::array();
      for (const auto& f : report.cv_folds) {
        folds.push_back({{"classifier", f.classifier},
                         {"fold", f.fold},
                         {"metrics", metrics_to_json(f.metrics)}});
      }
      j["cv_folds"] = std::move(folds);
    }
    std::ofstream out(fs::path(dir) / "report.json");
    out << j.dump(2) << '\n';
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "dataset") {
        cfg.dataset_path = value;
      } else if (key == "vocab") {
        cfg.vocabulary_path = value;
      } else if (key == "synth_n") {
        cfg.synth.n_samples = std::stoull(value);
      } else if (key == "synth_m") {
        cfg.synth.n_features = std::stoull(value);
      } else if (key == "synth_signal") {
        cfg.synth.n_signal = std::stoull(value);
      } else if (key == "synth_noise") {
        cfg.synth.flip_noise = std::stod(value);
      } else if (key == "synth_malware_fraction") {
        cfg.synth.malware_fraction = std::stod(value);
      } else if (key == "synth_background") {
        cfg.synth.background_density = std::stod(value);
      } else if (key == "classifiers") {
        cfg.classifiers.clear();
        for (const auto& name : split_list(value)) {
          cfg.classifiers.push_back(model_kind_from_string(name));
        }
      } else if (key == "scenarios") {
        cfg.scenarios = split_list(value);
      } else if (key == "lambdas") {
        cfg.lambdas.clear();
        for (const auto& v : split_list(value)) {
          cfg.lambdas.push_back(std::stod(v));
        }
      } else if (key == "repetitions") {
        cfg.repetitions = std::stoull(value);
      } else if (key == "seed") {
        cfg.master_seed = std::stoull(value);
      } else if (key == "top_features") {
        cfg.top_features = std::stoull(value);
      } else if (key == "out") {
        cfg.output_dir = value;
      } else if (key == "eval") {
        cfg.eval_mode = value;
      } else if (key == "defenses") {
        cfg.run_defenses = value == "on" || value == "true" || value == "1";
      } else if (key == "trees") {
        cfg.train.n_trees = std::stoull(value);
      } else if (key == "max_split_features") {
        cfg.train.max_split_features = std::stoull(value);
      } else if (key == "max_depth") {
        cfg.train.max_depth = std::stoull(value);
      } else if (key == "min_leaf") {
        cfg.train.min_leaf = std::stoull(value);
      } else if (key == "learning_rate") {
        cfg.train.learning_rate = std::stod(value);
      } else if (key == "epochs") {
        cfg.train.epochs = std::stoull(value);
      } else if (key == "batch_size") {
        cfg.train.batch_size = std::stoull(value);
      } else if (key == "regularization") {
        cfg.train.regularization = std::stod(value);
      } else if (key == "mlp_epochs") {
        cfg.mlp_epochs = std::stoull(value);
      } else if (key == "hidden_units") {
        cfg.train.hidden_units = std::stoull(value);
      } else if (key == "attack_k") {
        cfg.attack.k = std::stoull(value);
      } else if (key == "attack_fraction") {
        cfg.attack.malware_fraction = std::stod(value);
      } else if (key == "jsma_max_mods") {
        cfg.attack.jsma_max_mods = std::stoull(value);
      } else if (key == "aco_max_iter") {
        cfg.attack.aco.max_iter = std::stoull(value);
      } else if (key == "aco_ants") {
        cfg.attack.aco.n_ants = std::stoull(value);
      } else if (key == "aco_evaporation") {
        cfg.attack.aco.evaporation = std::stod(value);
      } else if (key == "aco_deposit") {
        cfg.attack.aco.deposit = std::stod(value);
      } else if (key == "aco_max_variables") {
        cfg.attack.aco.max_variables = std::stoull(value);
      } else if (key == "aco_threshold") {
        cfg.attack.aco.threshold = std::stod(value);
      } else if (key == "aco_stall") {
        cfg.attack.aco.cardinality_stall = std::stoull(value);
      } else {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": unknown key \"" + key + "\"");
      }
    } catch (const std::invalid_argument&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": bad value for " + key);
    } catch (const std::out_of_range&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": bad value for " + key);
    }
  }
  return cfg;
}

}  // namespace evade
