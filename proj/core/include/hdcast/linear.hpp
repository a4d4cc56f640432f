#pragma once

#include "hdcast/design.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hdcast::linear {

struct LinearFit {
    double intercept = 0.0;
    std::vector<std::string> names;    // predictor order
    std::vector<double> coefficients;  // aligned with names
    std::vector<double> std_errors;
    std::vector<double> t_values;
    std::vector<std::string> selection_order; // stepwise entry order; empty for plain OLS
    Eigen::VectorXd residuals;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double sigma2 = 0.0; // residual variance, n - p - 1 denominator
    double aic = 0.0;    // n log(SSR/n) + 2(p+1)
    std::size_t n = 0;
    std::size_t p = 0;

    double coefficient(std::string_view name) const;
};

/// Least squares with intercept through a column-pivoted QR of the centred design.
/// Throws ModelError listing linearly dependent columns when the design is rank deficient.
LinearFit ols_fit(const DesignMatrix &dm);
LinearFit ols_fit(const DesignMatrix &dm, std::span<const std::string> columns);

enum class StepCriterion { aic, pvalue };

struct StepwiseOptions {
    StepCriterion criterion = StepCriterion::aic;
    double alpha = 0.05;
    std::size_t max_steps = 0; // 0 = no limit
};

/// Greedy forward selection from the intercept-only model. Ties go to the
/// lowest column index.
LinearFit forward_stepwise(const DesignMatrix &dm, const StepwiseOptions &options = {});

/// intercept + sum_k beta_k x_k, on the scale the model was fitted on.
Eigen::VectorXd predict(const LinearFit &fit, const DesignMatrix &dm);

/// 1 - SSR/SST (0 when the target is constant).
double r_squared(const Eigen::VectorXd &actual, const Eigen::VectorXd &predicted);
double adjusted_r_squared(double r2, std::size_t n, std::size_t p);

} // namespace hdcast::linear
