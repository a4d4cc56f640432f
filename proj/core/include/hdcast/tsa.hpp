#pragma once

#include "hdcast/common.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace hdcast::tsa {

/// observed = trend + seasonal + remainder, seasonal periodic with zero mean.
struct Decomposition {
    std::size_t period = 52;
    Series observed;
    Series trend;
    Series seasonal;
    Series remainder;

    /// 0-based position within the period at which the seasonal pattern peaks.
    std::size_t peak_position() const;
};

/// Iterated subseries-mean decomposition. Each pass: seasonal = per-position
/// mean of the detrended series, re-centred to zero mean; trend = centred moving
/// average (window = period, truncated at the ends) of the deseasonalised series.
Decomposition seasonal_decompose(std::span<const double> x, std::size_t period = 52, int iterations = 2);

/// Centred moving average with a 2 x period window for even periods; the window
/// is truncated (and re-normalised) near the ends of the series.
Series centered_moving_average(std::span<const double> x, std::size_t window);

/// max(0, 1 - var(remainder) / var(seasonal + remainder)).
double seasonal_strength(const Decomposition &dec);

struct LagCorrelation {
    int lag = 0;
    double correlation = 0.0;
};

/// Correlation of (a_t, b_{t+k}) over the overlapping window for k in
/// [-max_lag, max_lag]; both series are centred on their full-sample means.
std::vector<LagCorrelation> cross_correlation(std::span<const double> a, std::span<const double> b, int max_lag);

/// Approximate 95% band for a white-noise cross-correlation.
inline double ccf_significance_bound(std::size_t n) { return 2.0 / std::sqrt(static_cast<double>(n)); }

/// Coefficients of (1-B)^d (1-B^s)^D, index j holding the coefficient of B^j.
std::vector<double> differencing_polynomial(int d, int D, int s);

/// Applies (1-B)^d (1-B^s)^D. Output has length n - d - D*s.
Series difference(std::span<const double> x, int d, int D, int s);

/// Inverse of difference(): rebuilds the original series from the differenced
/// values and the first d + D*s original values.
Series undifference(std::span<const double> differenced, std::span<const double> initial, int d, int D, int s);

/// KPSS level-stationarity statistic with Bartlett-weighted long-run variance.
double kpss_statistic(std::span<const double> x);
inline constexpr double kKpssCritical5 = 0.463;

double mean(std::span<const double> x);
double variance(std::span<const double> x); // population

} // namespace hdcast::tsa
