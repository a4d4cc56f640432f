#pragma once

#include "hdcast/arima.hpp"

namespace hdcast::arima {

struct HarmonicOptions {
    int min_harmonics = 1;
    int max_harmonics = 10;
    double period = 52.18;
    bool trend = true;
    int max_p = 2;
    int max_q = 2;
    FitOptions fit;
};

/// Fourier terms (+ linear trend + optional extra regressors) with stationary
/// ARMA errors; the number of harmonics K and the ARMA orders minimise AICc.
struct HarmonicFit {
    RegArimaFit model;
    int harmonics = 0;
    double period = 52.18;
    bool trend = true;
    std::size_t first_t = 1; // time index of the first training row
    std::vector<std::string> extra_names;
    std::vector<std::pair<int, double>> aicc_by_k; // best AICc per K
};

HarmonicFit fit_harmonic(std::span<const double> y, const DesignMatrix *extra, const HarmonicOptions &options = {},
                         std::size_t first_t = 1);

/// `extra_future` supplies the h future rows of the extra regressors, if any.
Forecast forecast_harmonic(const HarmonicFit &fit, int h, const DesignMatrix *extra_future = nullptr,
                           double level = 95.0);

/// Fourier (+ trend + extra) regressors for rows at times first_t .. first_t + n - 1.
DesignMatrix harmonic_regressors(std::size_t n, int harmonics, double period, bool trend, std::size_t first_t,
                                 const DesignMatrix *extra);

} // namespace hdcast::arima
