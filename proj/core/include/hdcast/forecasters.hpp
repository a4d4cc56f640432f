#pragma once

#include "hdcast/arima.hpp"
#include "hdcast/evaluation.hpp"
#include "hdcast/harmonic.hpp"

namespace hdcast::forecasters {

/// (p,1,q)(0,1,0)[52] for p <= max_p, q <= max_q.
std::vector<arima::ArimaSpec> seasonal_family(int max_p = 3, int max_q = 3, int s = 52);

/// Last value repeated.
evaluation::Forecaster constant_baseline();
/// Trailing-window mean repeated.
evaluation::Forecaster mean_baseline(std::size_t window = evaluation::kMeanWindow);

/// Fits sqrt(y) over `grid` by AICc at every origin; forecasts are on the HDI scale.
/// An empty grid means default_grid() of each training prefix.
evaluation::Forecaster univariate_arima(std::vector<arima::ArimaSpec> grid, arima::FitOptions fit = {});

struct ArimaxSetup {
    tsa::LagSpec lags = tsa::LagSpec::arimax();
    std::vector<arima::ArimaSpec> grid = seasonal_family();
    arima::FitOptions fit;
    arima::FillMode fill = arima::FillMode::persistence;
    std::vector<arima::ArimaSpec> si_grid = seasonal_family(); // SI model when fill = si_forecast
};

/// Regression of sqrt(HDI) on lagged SI with ARIMA errors. The forecaster
/// receives the HDI prefix and rebuilds regressors from the same prefix of `idx`.
evaluation::Forecaster arimax(indices::IndexSeries idx, ingest::WeeklySeries weekly, ArimaxSetup setup = {});

/// Training data for the ARIMAX model on the first `t` weeks.
struct ArimaxData {
    Series y;          // sqrt(HDI) from week max_lag onwards
    DesignMatrix xreg; // aligned lagged SI
    indices::IndexSeries idx;
};
ArimaxData arimax_data(const indices::IndexSeries &idx, const ingest::WeeklySeries &weekly, const tsa::LagSpec &lags,
                       std::size_t t);

/// Future regressors for an ARIMAX forecast, filling unknown SI by the chosen rule.
arima::XregFuture arimax_future(const indices::IndexSeries &idx, const tsa::LagSpec &lags, int h,
                                arima::FillMode fill, const std::vector<arima::ArimaSpec> &si_grid,
                                const arima::FitOptions &fit);

struct HarmonicSetup {
    arima::HarmonicOptions options;
    tsa::LagSpec lags; // extra lagged SI; empty = Fourier and trend only
};

evaluation::Forecaster harmonic(indices::IndexSeries idx, ingest::WeeklySeries weekly, HarmonicSetup setup = {});

indices::IndexSeries head(const indices::IndexSeries &idx, std::size_t n);

} // namespace hdcast::forecasters
