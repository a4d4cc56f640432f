#pragma once

#include "hdcast/arma_state_space.hpp"
#include "hdcast/design.hpp"
#include "hdcast/indices.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hdcast::arima {

struct ArimaSpec {
    int p = 0, d = 0, q = 0;
    int P = 0, D = 0, Q = 0;
    int s = 1;

    /// "p,d,q" or "p,d,q:P,D,Q:s".
    static ArimaSpec parse(std::string_view text);
    std::string to_string() const; // ARIMA(p,d,q)(P,D,Q)[s]
    int arma_params() const { return p + q + P + Q; }
    int diff_order() const { return d + D * s; }
    void validate() const;

    friend bool operator==(const ArimaSpec &, const ArimaSpec &) = default;
};

enum class Transform { none, sqrt };

struct RegArimaFit {
    ArimaSpec spec;
    Transform transform = Transform::none; // scale the series was fitted on, relative to the reported scale
    std::vector<std::string> xreg_names;
    std::vector<double> beta;
    bool has_mean = false;
    double mean = 0.0;
    std::vector<double> ar, ma, sar, sma;
    double sigma2 = 0.0;
    double loglik = 0.0;
    double aic = 0.0;
    double aicc = 0.0;
    std::size_t n_effective = 0;
    int n_params = 0; // including sigma2
    std::vector<std::string> warnings;

    // Training data, kept so forecasts can rebuild the filter state.
    Series y;
    Eigen::MatrixXd xreg;

    double beta_of(std::string_view name) const;
    ArmaPoly poly() const;
};

struct FitOptions {
    bool include_mean = true;     // intercept in the error model when d = D = 0
    int retries = 2;              // perturbed restarts when the AR part hits the stationarity boundary
    std::uint64_t seed = 20160101; // for restart perturbations
    Transform transform = Transform::none;
};

RegArimaFit fit_regarima(std::span<const double> y, const ArimaSpec &spec, const FitOptions &options = {});
/// xreg rows align with y; the columns enter as regressors with ARIMA errors.
RegArimaFit fit_regarima(std::span<const double> y, const DesignMatrix &xreg, const ArimaSpec &spec,
                         const FitOptions &options = {});

struct SelectionRecord {
    ArimaSpec spec;
    bool ok = false;
    double aicc = 0.0;
    std::string message;
};

struct Selection {
    RegArimaFit best;
    std::vector<SelectionRecord> records; // grid order
};

/// Minimum AICc over the grid; ties go to fewer parameters, then grid order.
Selection auto_select(std::span<const double> y, const DesignMatrix *xreg, const std::vector<ArimaSpec> &grid,
                      const FitOptions &options = {});

struct GridOptions {
    int max_p = 3;
    int max_q = 3;
    int s = 52;
    double seasonal_threshold = 0.64;
};

/// d from KPSS, D from seasonal strength, p and q over 0..max with P = Q = 0.
/// With regressors the tests run on OLS residuals.
std::vector<ArimaSpec> default_grid(std::span<const double> y, const DesignMatrix *xreg, const GridOptions &options = {});

struct Forecast {
    int horizon = 0;
    double level = 95.0;
    Series point;
    Series lower;
    Series upper;
    std::vector<std::string> xreg_fill; // per step: ';'-joined list of filled regressors
    Series model_point; // on the fitted scale
    Series model_se;    // on the fitted scale
};

Forecast forecast(const RegArimaFit &fit, int h, const DesignMatrix *xreg_future = nullptr, double level = 95.0);

enum class FillMode { persistence, si_forecast };

struct XregFuture {
    DesignMatrix matrix;
    std::vector<std::vector<bool>> filled; // [step][column]
    std::vector<std::string> step_labels() const;
};

/// Lagged SI regressors for steps 1..h past the end of `idx`. Lags reaching
/// past the last observation are filled by persistence or, when provided, by
/// `si_path` (h future SI values).
XregFuture lagged_xreg_future(const indices::IndexSeries &idx, const tsa::LagSpec &lag_spec, int h,
                              const Series *si_path = nullptr);

double normal_quantile(double p);

std::string format_forecast_csv(const Forecast &f);

} // namespace hdcast::arima
