#include "evade/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace evade {

ConfusionCounts confusion(const std::vector<int>& predictions,
                          const std::vector<int>& truth) {
  if (predictions.size() != truth.size()) {
    throw std::invalid_argument("confusion: length mismatch");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      ++(predictions[i] == 1 ? c.tp : c.fn);
    } else {
      ++(predictions[i] == 0 ? c.tn : c.fp);
    }
  }
  return c;
}

namespace {

std::optional<double> ratio(double numerator, double denominator) {
  if (denominator == 0.0) return std::nullopt;
  return numerator / denominator;
}

}  // namespace

std::optional<double> accuracy(const ConfusionCounts& c) {
  return ratio(double(c.tp + c.tn), double(c.total()));
}

std::optional<double> precision(const ConfusionCounts& c) {
  return ratio(double(c.tp), double(c.tp + c.fp));
}

std::optional<double> recall(const ConfusionCounts& c) {
  return ratio(double(c.tp), double(c.tp + c.fn));
}

std::optional<double> fpr_paper(const ConfusionCounts& c) {
  return ratio(double(c.fp), double(c.tp + c.tn));
}

std::optional<double> fpr_standard(const ConfusionCounts& c) {
  return ratio(double(c.fp), double(c.fp + c.tn));
}

std::optional<double> auc_paper(const ConfusionCounts& c) {
  auto left = ratio(double(c.tp), double(c.tp + c.fp));
  auto right = ratio(double(c.tn), double(c.tn + c.fp));
  if (!left || !right) return std::nullopt;
  return 0.5 * (*left + *right);
}

std::optional<double> auc_roc(const std::vector<double>& scores,
                              const std::vector<int>& truth) {
  if (scores.size() != truth.size()) {
    throw std::invalid_argument("auc_roc: length mismatch");
  }
  // rank-sum form of the pairwise probability; O(n log n)
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  std::size_t positives = 0, negatives = 0;
  for (int y : truth) (y == 1 ? positives : negatives)++;
  if (positives == 0 || negatives == 0) return std::nullopt;

  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // ties share the average rank of their block (1-based ranks)
    const double avg_rank = 0.5 * ((i + 1) + j);
    for (std::size_t k = i; k < j; ++k) {
      if (truth[order[k]] == 1) rank_sum += avg_rank;
    }
    i = j;
  }
  const double u =
      rank_sum - 0.5 * double(positives) * double(positives + 1);
  return u / (double(positives) * double(negatives));
}

MetricsReport metrics_from_counts(const ConfusionCounts& c) {
  MetricsReport r;
  r.counts = c;
  r.accuracy = accuracy(c);
  r.precision = precision(c);
  r.recall = recall(c);
  r.fpr_paper = fpr_paper(c);
  r.fpr_standard = fpr_standard(c);
  r.auc_paper = auc_paper(c);
  return r;
}

MetricsReport evaluate_model(const Classifier& model, const Dataset& data) {
  std::vector<int> predictions(data.size());
  std::vector<double> scores(data.size());
  std::vector<int> truth(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    scores[i] = model.decision_score(data.samples[i].features);
    predictions[i] = scores[i] > model.threshold() ? 1 : 0;
    truth[i] = data.samples[i].label;
  }
  MetricsReport r = metrics_from_counts(confusion(predictions, truth));
  r.auc_roc = auc_roc(scores, truth);
  return r;
}

const char* const kMetricColumns =
    "accuracy,fpr_paper,fpr_standard,precision,recall,auc_paper,auc_roc";

namespace {

std::string cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

}  // namespace

std::string metrics_csv_row(const MetricsReport& r) {
  std::ostringstream out;
  out << cell(r.accuracy) << ',' << cell(r.fpr_paper) << ','
      << cell(r.fpr_standard) << ',' << cell(r.precision) << ','
      << cell(r.recall) << ',' << cell(r.auc_paper) << ',' << cell(r.auc_roc);
  return out.str();
}

std::string metrics_json(const MetricsReport& r) {
  nlohmann::json j;
  j["counts"] = {{"tp", r.counts.tp},
                 {"tn", r.counts.tn},
                 {"fp", r.counts.fp},
                 {"fn", r.counts.fn}};
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) {
      j[key] = *v;
    } else {
      j[key] = nullptr;
    }
  };
  put("accuracy", r.accuracy);
  put("fpr_paper", r.fpr_paper);
  put("fpr_standard", r.fpr_standard);
  put("precision", r.precision);
  put("recall", r.recall);
  put("auc_paper", r.auc_paper);
  put("auc_roc", r.auc_roc);
  return j.dump();
}

}  // namespace evade
