#include "hdcast/ensemble.hpp"

#include "hdcast/evaluation.hpp"
#include "hdcast/parallel.hpp"

#include <cmath>
#include <limits>

namespace hdcast::ensemble {

SubPredictions predict_parts(const EnsembleModel &model, const DesignMatrix &dm) {
    SubPredictions p;
    p.linear = linear::predict(model.linear, dm);
    p.cart = predict(model.cart, dm);
    p.mlp = predict(model.mlp, dm);
    return p;
}

Eigen::VectorXd combine(const SubPredictions &parts, const std::array<double, 3> &weights) {
    return weights[0] * parts.linear + weights[1] * parts.cart + weights[2] * parts.mlp;
}

Eigen::VectorXd predict_ensemble(const EnsembleModel &model, const DesignMatrix &dm) {
    return combine(predict_parts(model, dm), model.weights);
}

TunedWeights tune_weights(const SubPredictions &parts, const Eigen::VectorXd &target, double grid_step) {
    const auto n = target.size();
    if (parts.linear.size() != n || parts.cart.size() != n || parts.mlp.size() != n) {
        throw std::invalid_argument("tune_weights: prediction and target lengths differ");
    }
    const double steps_real = 1.0 / grid_step;
    const auto steps = static_cast<int>(std::lround(steps_real));
    if (!(grid_step > 0.0) || steps < 1 || std::abs(steps_real - steps) > 1e-9) {
        throw std::invalid_argument("tune_weights: grid_step must divide 1");
    }
    TunedWeights best;
    best.adj_r2 = -std::numeric_limits<double>::infinity();
    double best_distance = std::numeric_limits<double>::infinity();
    for (int a = 0; a <= steps; ++a) {
        for (int b = 0; a + b <= steps; ++b) {
            const std::array<double, 3> w{static_cast<double>(a) / steps, static_cast<double>(b) / steps,
                                          static_cast<double>(steps - a - b) / steps};
            ++best.candidates;
            const double r2 = linear::r_squared(target, combine(parts, w));
            const double adj = linear::adjusted_r_squared(r2, static_cast<std::size_t>(n), 2);
            double distance = 0.0;
            for (int k = 0; k < 3; ++k) distance += std::pow(w[static_cast<std::size_t>(k)] - kDefaultWeights[static_cast<std::size_t>(k)], 2);
            if (adj > best.adj_r2 || (adj == best.adj_r2 && distance < best_distance)) {
                best.adj_r2 = adj;
                best.weights = w;
                best_distance = distance;
            }
        }
    }
    return best;
}

namespace {

EnsembleModel fit_parts(const DesignMatrix &train, const EnsembleOptions &options) {
    EnsembleModel m;
    parallel_for(3, [&](std::size_t which) {
        switch (which) {
        case 0: m.linear = linear::forward_stepwise(train); break;
        case 1: m.cart = fit_cart(train, options.cart_depth, options.cart_min_leaf); break;
        default: m.mlp = fit_mlp(train, options.mlp); break;
        }
    });
    return m;
}

} // namespace

EnsembleFit fit_ensemble(const DesignMatrix &train, const EnsembleOptions &options, const DesignMatrix *test) {
    EnsembleFit fit;
    switch (options.tuning) {
    case WeightTuning::fixed:
        fit.model = fit_parts(train, options);
        fit.tuned_on = "fixed";
        break;
    case WeightTuning::validation: {
        const auto split = evaluation::split_train_test(train, 1.0 - options.validation_fraction,
                                                        evaluation::SplitMode::random, options.seed);
        const auto inner = fit_parts(split.train, options);
        const auto tuned = tune_weights(predict_parts(inner, split.test), split.test.target, options.grid_step);
        fit.model = fit_parts(train, options);
        fit.model.weights = tuned.weights;
        fit.tuning_adj_r2 = tuned.adj_r2;
        fit.tuned_on = "validation";
        break;
    }
    case WeightTuning::test: {
        if (!test) throw std::invalid_argument("fit_ensemble: test tuning needs a test set");
        fit.model = fit_parts(train, options);
        const auto tuned = tune_weights(predict_parts(fit.model, *test), test->target, options.grid_step);
        fit.model.weights = tuned.weights;
        fit.tuning_adj_r2 = tuned.adj_r2;
        fit.tuned_on = "test";
        break;
    }
    }
    return fit;
}

} // namespace hdcast::ensemble
