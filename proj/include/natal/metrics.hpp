#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "natal/ingest.hpp"

namespace natal {

// positive class = NotSurvival = label 1
struct ConfusionCounts {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    long total() const { return tp + fp + tn + fn; }
};

ConfusionCounts confusion(const LabelVector& y_true, const LabelVector& y_pred);

// zero-denominator convention: 0.0
std::pair<double, double> precision_recall(const ConfusionCounts& c);

// Mann-Whitney rank statistic with half credit for ties; equals the
// trapezoidal ROC area. Throws when only one class is present.
double roc_auc(const Eigen::VectorXd& scores, const LabelVector& y_true);

struct StratumRow {
    std::string stratum;
    long deaths = 0;
    long caught = 0;
    std::optional<double> recall;  // empty when deaths == 0 (N/A)
};

// strata[i] is the stratum index of record i (only consulted where
// y_true[i]==1; use -1 for non-deaths). Throws when a death carries no
// stratum. stratum_names fixes row order and count.
std::vector<StratumRow> stratified_recall(const LabelVector& y_true, const LabelVector& y_pred,
                                          const std::vector<int>& strata,
                                          const std::vector<std::string>& stratum_names);

}  // namespace natal
