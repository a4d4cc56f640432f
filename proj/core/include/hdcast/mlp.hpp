#pragma once

#include "hdcast/design.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hdcast::ensemble {

/// One tanh hidden layer, linear output.
struct MlpWeights {
    Eigen::MatrixXd w1; // hidden x inputs
    Eigen::VectorXd b1; // hidden
    Eigen::VectorXd w2; // hidden
    double b2 = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + 1); }
    Eigen::VectorXd flatten() const;
    static MlpWeights unflatten(const Eigen::VectorXd &flat, Eigen::Index inputs, Eigen::Index hidden);
};

MlpWeights init_weights(Eigen::Index inputs, Eigen::Index hidden, std::uint64_t seed);

/// 0.5 * mean squared error of the network on (z, y).
double mlp_loss(const MlpWeights &w, const Eigen::MatrixXd &z, const Eigen::VectorXd &y);
/// Analytic gradient of mlp_loss, laid out like MlpWeights::flatten().
Eigen::VectorXd mlp_gradient(const MlpWeights &w, const Eigen::MatrixXd &z, const Eigen::VectorXd &y);
Eigen::VectorXd mlp_forward(const MlpWeights &w, const Eigen::MatrixXd &z);

struct MlpOptions {
    int hidden = 8;
    int epochs = 2000;
    double learn_rate = 0.01;
    std::uint64_t seed = 1;
};

struct MlpModel {
    std::vector<std::string> columns;
    Eigen::VectorXd means, scales; // input standardisation
    double target_mean = 0.0, target_scale = 1.0;
    MlpWeights weights;
    MlpOptions options;
    std::vector<double> loss_history; // per epoch, standardised scale
};

/// Full-batch gradient descent on standardised inputs and target.
/// Throws ModelError when the loss stops being finite.
MlpModel fit_mlp(const DesignMatrix &dm, const MlpOptions &options = {});

Eigen::VectorXd predict(const MlpModel &model, const DesignMatrix &dm);

} // namespace hdcast::ensemble
