#include "natal/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace natal {

ConfusionCounts confusion(const LabelVector& y_true, const LabelVector& y_pred) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("confusion: length mismatch");
    ConfusionCounts c;
    for (Eigen::Index i = 0; i < y_true.size(); ++i) {
        bool t = y_true(i) != 0.0, p = y_pred(i) != 0.0;
        if (t && p) ++c.tp;
        else if (t) ++c.fn;
        else if (p) ++c.fp;
        else ++c.tn;
    }
    return c;
}

std::pair<double, double> precision_recall(const ConfusionCounts& c) {
    double precision = (c.tp + c.fp) == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    double recall = (c.tp + c.fn) == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return {precision, recall};
}

double roc_auc(const Eigen::VectorXd& scores, const LabelVector& y_true) {
    if (scores.size() != y_true.size())
        throw std::invalid_argument("roc_auc: length mismatch");
    const Eigen::Index n = scores.size();
    long n1 = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (y_true(i) != 0.0) ++n1;
    long n0 = n - n1;
    if (n1 == 0 || n0 == 0) throw std::invalid_argument("roc_auc: single-class input");

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return scores(a) < scores(b); });

    // sum of midranks over positives
    double rank_sum = 0.0;
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        while (j < n && scores(order[j]) == scores(order[i])) ++j;
        double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (Eigen::Index k = i; k < j; ++k)
            if (y_true(order[k]) != 0.0) rank_sum += midrank;
        i = j;
    }
    return (rank_sum - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1)) /
           (static_cast<double>(n1) * static_cast<double>(n0));
}

std::vector<StratumRow> stratified_recall(const LabelVector& y_true, const LabelVector& y_pred,
                                          const std::vector<int>& strata,
                                          const std::vector<std::string>& stratum_names) {
    if (y_true.size() != y_pred.size() || static_cast<std::size_t>(y_true.size()) != strata.size())
        throw std::invalid_argument("stratified_recall: length mismatch");
    std::vector<StratumRow> table(stratum_names.size());
    for (std::size_t s = 0; s < stratum_names.size(); ++s) table[s].stratum = stratum_names[s];
    for (Eigen::Index i = 0; i < y_true.size(); ++i) {
        if (y_true(i) == 0.0) continue;
        int s = strata[static_cast<std::size_t>(i)];
        if (s < 0 || s >= static_cast<int>(stratum_names.size()))
            throw std::invalid_argument("stratified_recall: death at row " + std::to_string(i) +
                                        " has no stratum assignment");
        ++table[s].deaths;
        if (y_pred(i) != 0.0) ++table[s].caught;
    }
    for (auto& row : table)
        if (row.deaths > 0) row.recall = static_cast<double>(row.caught) / static_cast<double>(row.deaths);
    return table;
}

}  // namespace natal
