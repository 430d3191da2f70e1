#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "natal/classifier.hpp"

namespace natal {

enum class Penalty { LassoL1, RidgeL2, LogisticNone };

struct LinearModel {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    Penalty penalty = Penalty::RidgeL2;
    double alpha = 0.0;  // L1 or L2 strength depending on penalty
    double threshold = 0.5;
    bool converged = true;

    // LAS/RID: Xw + b; LOG: sigmoid(Xw + b)
    Eigen::VectorXd score(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
    LabelVector predict(const Eigen::Ref<const Eigen::MatrixXd>& X) const;

    void save(std::ostream& os, const std::vector<ColumnInfo>& columns) const;
    static LinearModel load(std::istream& is);

    Classifier as_classifier(std::string name) const;
};

// L1-penalized least squares, objective (1/2n)||y - Xw - b||^2 + alpha*||w||_1,
// solved by cyclic coordinate descent with soft thresholding on internally
// standardized columns (constant columns get weight 0). Weights are mapped
// back to the original scale.
LinearModel fit_lasso(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                      double alpha, double tol = 1e-8, int max_iter = 1000);

// Exact solution of (1/2n)||y - Xw - b||^2 + (alpha/2)||w||^2 with an
// unpenalized intercept.
LinearModel fit_ridge(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                      double alpha);

// Penalized log-likelihood ascent with backtracking line search; l2 penalizes
// the raw-scale weight norm even though iterations run on standardized
// coordinates.
LinearModel fit_logistic(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                         double l2 = 0.0, double tol = 1e-8, int max_iter = 1000);

double sigmoid(double z);

// mean penalized negative log-likelihood, computed stably from logits
double logistic_loss(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                     const Eigen::VectorXd& w, double b, double l2);

}  // namespace natal
