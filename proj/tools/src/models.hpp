#pragma once

// Model artifacts as the CLI stores them: the core model JSON plus a
// "pipeline" block recording how its inputs were built.

#include "support.hpp"

#include "hdcast/arima.hpp"
#include "hdcast/evaluation.hpp"

namespace hdcast::cli {

struct SplitOptions {
    std::string mode = "random"; // random, chronological or none
    double fraction = 0.8;
    std::uint64_t seed = 1;

    void add_to(CLI::App *sub);
    Json to_json() const;
    static SplitOptions from_json(const Json &j);
    /// Train rows and test rows of `dm` (test empty when mode is none).
    evaluation::Split apply(const DesignMatrix &dm) const;
};

/// Regression models on a lagged design: "stepwise", "lasso" or "ensemble".
bool is_regression(const std::string &kind);
bool is_time_series(const std::string &kind);

/// Fits `kind` with `options` on `train`. `test` only matters for ensemble test tuning.
Json fit_regression(const std::string &kind, const Json &options, const DesignMatrix &train,
                    const DesignMatrix *test = nullptr);
/// Builds the design for `weekly`, splits it and fits on the training rows;
/// the artifact carries a "pipeline" block so it can be re-evaluated.
Json fit_regression_pipeline(const std::string &kind, const Json &options, const ingest::WeeklySeries &weekly,
                             const tsa::LagSpec &lags, const SplitOptions &split);
/// Predictions on the sqrt(HDI) scale.
Eigen::VectorXd predict_regression(const Json &model, const DesignMatrix &dm);
/// Options that refit the same method on other rows (resolved lambda fraction etc).
Json refit_options(const Json &model);
std::size_t predictor_count(const Json &model);

/// Direct forecast of the next h weeks past the end of `weekly`; h must not
/// exceed the shortest positive lag. Contemporaneous inputs are held at their
/// last value.
arima::Forecast forecast_regression(const Json &model, const ingest::WeeklySeries &weekly, int h);

/// Regressor source for a time-series model: lagged SI (possibly empty).
tsa::LagSpec xreg_lags(const Json &model);
arima::FillMode parse_fill(const std::string &text);

/// Forecast of a regarima or harmonic artifact; `weekly` supplies SI for lagged regressors.
arima::Forecast forecast_time_series(const Json &model, const ingest::WeeklySeries *weekly, int h, double level,
                                     arima::FillMode fill);
/// Same model structure refitted at every origin.
evaluation::Forecaster time_series_forecaster(const Json &model, const ingest::WeeklySeries &weekly,
                                              arima::FillMode fill);

/// Rolling-origin report for any forecaster of HDI, with baselines.
/// `n_params` (0 = unknown) feeds the adjusted R^2.
evaluation::EvalReport rolling_report(const std::string &name, const evaluation::Forecaster &forecaster,
                                      const ingest::WeeklySeries &weekly, int h, std::size_t min_train,
                                      int n_params);
/// Rolling-origin report for a regarima or harmonic artifact with baselines.
evaluation::EvalReport evaluate_time_series(const Json &model, const ingest::WeeklySeries &weekly, int h,
                                            std::size_t min_train, arima::FillMode fill);
/// Held-out test metrics, k-fold CV and baselines for a regression artifact.
/// h = 0 scores the baselines at the model's direct-forecast reach.
evaluation::EvalReport evaluate_regression(const Json &model, const ingest::WeeklySeries &weekly, int h,
                                           std::size_t min_train, std::size_t folds, std::uint64_t cv_seed);

/// Shortest positive lag of a regression artifact's design.
int forecast_reach(const tsa::LagSpec &lags);

/// Pooled R^2 of all successful origin forecasts.
double pooled_r2(const evaluation::RollingResult &r, std::size_t *count = nullptr);

} // namespace hdcast::cli
