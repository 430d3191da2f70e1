#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "natal/classifier.hpp"

namespace natal {

struct GnbModel {
    double log_prior[2] = {0.0, 0.0};
    Eigen::MatrixXd mean;      // 2 x p
    Eigen::MatrixXd variance;  // 2 x p, floored at eps
    double eps = 0.0;
    double threshold = 0.5;

    // P(y=1|x) per row, computed in log space
    Eigen::VectorXd score(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
    Classifier as_classifier(std::string name = "GNB") const;
};

// eps < 0 selects the default floor 1e-9 * (largest column variance)
GnbModel fit_gnb(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                 double eps = -1.0);

double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& z, double gamma);

struct OcsvmModel {
    Eigen::MatrixXd support;  // all training rows (alpha may be zero)
    Eigen::VectorXd alpha;    // sums to 1; each in [0, 1/(nu*n)]
    double rho = 0.0;
    double gamma = 0.0;
    double nu = 0.5;
    bool converged = true;

    // f(x) = sum_i alpha_i k(x_i, x) - rho; inside the boundary when f >= 0
    Eigen::VectorXd decision(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
    // risk score = -f(x); hard label 1 (outlier / NotSurvival) iff f < 0
    Eigen::VectorXd score(const Eigen::Ref<const Eigen::MatrixXd>& X) const;

    void save(std::ostream& os) const;
    static OcsvmModel load(std::istream& is);
    Classifier as_classifier(std::string name = "SVM") const;
};

// Solves min 1/2 a'Ka  s.t.  sum a = 1, 0 <= a_i <= 1/(nu*n) by pairwise
// coordinate updates on the most violating pair.
OcsvmModel fit_ocsvm(const Eigen::Ref<const Eigen::MatrixXd>& X_majority, double gamma, double nu,
                     double tol = 1e-6, long max_iter = 200000);

double ocsvm_dual_objective(const OcsvmModel& m);

}  // namespace natal
