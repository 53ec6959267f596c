#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evade/model.hpp"

namespace evade {

// Malware = positive class.
struct ConfusionCounts {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
};

ConfusionCounts confusion(const std::vector<int>& predictions,
                          const std::vector<int>& truth);

// Each ratio is absent (nullopt) when its denominator is zero, never 0.
std::optional<double> accuracy(const ConfusionCounts& c);
std::optional<double> precision(const ConfusionCounts& c);
std::optional<double> recall(const ConfusionCounts& c);
// FP / (TP + TN), a nonstandard rate kept alongside the usual one.
std::optional<double> fpr_paper(const ConfusionCounts& c);
// FP / (FP + TN).
std::optional<double> fpr_standard(const ConfusionCounts& c);
// (TP/(TP+FP) + TN/(TN+FP)) / 2, companion to fpr_paper above.
std::optional<double> auc_paper(const ConfusionCounts& c);

// Threshold-sweep ROC area; equals the probability that a random positive
// outscores a random negative (ties count half). Absent if either class is
// missing.
std::optional<double> auc_roc(const std::vector<double>& scores,
                              const std::vector<int>& truth);

struct MetricsReport {
  ConfusionCounts counts;
  std::optional<double> accuracy, precision, recall;
  std::optional<double> fpr_paper, fpr_standard;
  std::optional<double> auc_paper, auc_roc;
};

MetricsReport metrics_from_counts(const ConfusionCounts& c);
MetricsReport evaluate_model(const Classifier& model, const Dataset& data);

// Fixed column order used by every CSV and JSON report:
// accuracy,fpr_paper,fpr_standard,precision,recall,auc_paper,auc_roc
extern const char* const kMetricColumns;
std::string metrics_csv_row(const MetricsReport& report);
std::string metrics_json(const MetricsReport& report);

}  // namespace evade
