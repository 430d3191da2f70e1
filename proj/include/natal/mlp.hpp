#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "natal/classifier.hpp"

namespace natal {

struct MlpParams {
    std::array<int, 3> hidden = {64, 32, 16};
    int epochs = 20;
    int batch_size = 256;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double init_scale = 0.1;
    std::uint64_t seed = 0;
};

// relu hidden layers, sigmoid output; inputs standardized with the stored
// training statistics
struct MlpModel {
    std::array<Eigen::MatrixXd, 4> W;  // layer l maps width[l] -> width[l+1]
    std::array<Eigen::VectorXd, 4> b;
    Eigen::VectorXd input_mean, input_scale;
    std::vector<double> epoch_loss;
    double threshold = 0.5;

    Eigen::VectorXd score(const Eigen::Ref<const Eigen::MatrixXd>& X) const;

    void save(std::ostream& os) const;
    static MlpModel load(std::istream& is);
    Classifier as_classifier(std::string name = "NN") const;
};

struct MlpGradients {
    std::array<Eigen::MatrixXd, 4> W;
    std::array<Eigen::VectorXd, 4> b;
};

Eigen::VectorXd mlp_forward(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X);

// exact gradients of the mean binary cross entropy over the batch
MlpGradients mlp_backward(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& Xbatch,
                          const LabelVector& ybatch);

double mlp_loss(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                const LabelVector& y);

MlpModel fit_mlp(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                 const MlpParams& params);

}  // namespace natal
