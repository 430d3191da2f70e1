#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "natal/classifier.hpp"

namespace natal {

struct GbtParams {
    int max_depth = 3;
    double min_child_weight = 3.0;  // hessian-sum units
    double subsample = 0.7;
    double learning_rate = 0.01;
    int n_estimators = 1250;
    double colsample_bytree = 0.8;
    double lambda = 1.0;      // leaf L2
    double gamma_split = 0.0; // minimum gain
    double base_score = -1.0; // <0: training minority fraction
    std::uint64_t seed = 0;
    int threads = 1;
};

struct TreeNode {
    int feature = -1;  // leaf when < 0
    double threshold = 0.0;
    int left = -1, right = -1;
    double weight = 0.0;  // leaf value
    double gain = 0.0;    // split gain (internal nodes)
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // node 0 is the root
    double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

struct GbtModel {
    std::vector<RegressionTree> trees;
    GbtParams params;
    double base_logit = 0.0;
    Eigen::VectorXd column_gain;          // cumulative split gain per input column
    std::vector<double> train_loss;       // per-round logistic loss on the full training set
    bool degenerate = false;              // constant-label input, base score only
    double threshold = 0.5;

    // sigmoid(base_logit + sum_t lr * tree_t(x))
    Eigen::VectorXd score(const Eigen::Ref<const Eigen::MatrixXd>& X) const;

    void save(std::ostream& os) const;
    static GbtModel load(std::istream& is);
    Classifier as_classifier(std::string name = "XGB") const;
};

GbtModel fit_gbt(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                 const GbtParams& params);

// Per-column gains summed back to source features (via column metadata),
// sorted by descending gain; ties keep schema order. One entry per source
// feature, including never-split features at gain 0.
std::vector<std::pair<std::string, double>> feature_importance(const GbtModel& model,
                                                               const std::vector<ColumnInfo>& columns);

// split search on one node, exposed for oracle tests: returns (column,
// threshold, gain) of the best split or feature=-1 when no admissible split
// exists. Candidate thresholds are midpoints of consecutive distinct values.
struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};
SplitChoice best_split(const Eigen::Ref<const Eigen::MatrixXd>& X,
                       const Eigen::VectorXd& grad, const Eigen::VectorXd& hess,
                       const std::vector<Eigen::Index>& rows, const std::vector<int>& cols,
                       double lambda, double gamma_split, double min_child_weight, int threads = 1);

}  // namespace natal
