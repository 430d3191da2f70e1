#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>

#include "natal/ingest.hpp"

namespace natal {

// Type-erased fitted model: a real-valued risk score per row plus a decision
// threshold for hard labels (label 1 iff score >= threshold).
struct Classifier {
    std::function<Eigen::VectorXd(const Eigen::Ref<const Eigen::MatrixXd>&)> score_fn;
    double threshold = 0.5;
    bool converged = true;
    std::string name;

    Eigen::VectorXd score(const Eigen::Ref<const Eigen::MatrixXd>& X) const { return score_fn(X); }

    LabelVector predict(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
        Eigen::VectorXd s = score_fn(X);
        LabelVector y(s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i) y(i) = s(i) >= threshold ? 1.0 : 0.0;
        return y;
    }
};

// fits a model on (X, y); throwing marks the attempt failed
using Learner =
    std::function<Classifier(const Eigen::Ref<const Eigen::MatrixXd>&, const LabelVector&)>;

}  // namespace natal
