#pragma once

#include "hdcast/cart.hpp"
#include "hdcast/linear.hpp"
#include "hdcast/mlp.hpp"

#include <array>

namespace hdcast::ensemble {

inline constexpr std::array<double, 3> kDefaultWeights{0.15, 0.05, 0.80};

struct EnsembleModel {
    linear::LinearFit linear;
    CartTree cart;
    MlpModel mlp;
    std::array<double, 3> weights = kDefaultWeights; // linear, CART, network
};

struct SubPredictions {
    Eigen::VectorXd linear, cart, mlp;
};

SubPredictions predict_parts(const EnsembleModel &model, const DesignMatrix &dm);
/// Weighted sum of the sub-model predictions on the fitted (square-root) scale.
Eigen::VectorXd predict_ensemble(const EnsembleModel &model, const DesignMatrix &dm);
Eigen::VectorXd combine(const SubPredictions &parts, const std::array<double, 3> &weights);

struct TunedWeights {
    std::array<double, 3> weights = kDefaultWeights;
    double adj_r2 = 0.0;
    std::size_t candidates = 0;
};

/// Exhaustive search over the simplex lattice with spacing grid_step for the
/// maximum adjusted R^2; ties go to the candidate closest to the default weights.
TunedWeights tune_weights(const SubPredictions &parts, const Eigen::VectorXd &target, double grid_step = 0.05);

enum class WeightTuning { fixed, validation, test };

struct EnsembleOptions {
    WeightTuning tuning = WeightTuning::validation;
    double validation_fraction = 0.2;
    double grid_step = 0.05;
    int cart_depth = 6;
    std::size_t cart_min_leaf = 5;
    MlpOptions mlp;
    std::uint64_t seed = 1; // validation split
};

struct EnsembleFit {
    EnsembleModel model;
    std::string tuned_on; // "fixed", "validation" or "test"
    double tuning_adj_r2 = 0.0;
};

/// Fits the three sub-models on `train` (concurrently). With test tuning the
/// weights are chosen on `test`, which must then be supplied.
EnsembleFit fit_ensemble(const DesignMatrix &train, const EnsembleOptions &options = {},
                         const DesignMatrix *test = nullptr);

} // namespace hdcast::ensemble
