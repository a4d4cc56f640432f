#include "hdcast/tsa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hdcast::tsa {

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.empty()) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size());
}

Series centered_moving_average(std::span<const double> x, std::size_t window) {
    const auto n = static_cast<long>(x.size());
    const long half = static_cast<long>(window / 2);
    const bool even = window % 2 == 0;
    Series out(x.size());
    for (long t = 0; t < n; ++t) {
        double sum = 0.0, weight = 0.0;
        for (long j = -half; j <= half; ++j) {
            const long i = t + j;
            if (i < 0 || i >= n) continue;
            const double w = (even && (j == -half || j == half)) ? 0.5 : 1.0;
            sum += w * x[static_cast<std::size_t>(i)];
            weight += w;
        }
        out[static_cast<std::size_t>(t)] = sum / weight;
    }
    return out;
}

Decomposition seasonal_decompose(std::span<const double> x, std::size_t period, int iterations) {
    if (period < 2) throw std::invalid_argument("seasonal_decompose: period must be at least 2");
    if (iterations < 1 || iterations > 10) throw std::invalid_argument("seasonal_decompose: iterations must be 1..10");
    if (x.size() < 2 * period) {
        throw DataError("seasonal_decompose: series of length " + std::to_string(x.size()) +
                        " is shorter than two periods");
    }
    const std::size_t n = x.size();
    Decomposition dec;
    dec.period = period;
    dec.observed.assign(x.begin(), x.end());
    dec.trend.assign(n, 0.0);
    dec.seasonal.assign(n, 0.0);

    std::vector<double> pattern(period);
    for (int it = 0; it < iterations; ++it) {
        std::fill(pattern.begin(), pattern.end(), 0.0);
        std::vector<std::size_t> count(period, 0);
        for (std::size_t t = 0; t < n; ++t) {
            pattern[t % period] += x[t] - dec.trend[t];
            ++count[t % period];
        }
        for (std::size_t k = 0; k < period; ++k) pattern[k] /= static_cast<double>(count[k]);
        const double level = mean(pattern);
        for (auto &v : pattern) v -= level;

        Series deseasonalised(n);
        for (std::size_t t = 0; t < n; ++t) {
            dec.seasonal[t] = pattern[t % period];
            deseasonalised[t] = x[t] - dec.seasonal[t];
        }
        dec.trend = centered_moving_average(deseasonalised, period);
    }
    dec.remainder.resize(n);
    for (std::size_t t = 0; t < n; ++t) dec.remainder[t] = x[t] - dec.trend[t] - dec.seasonal[t];
    return dec;
}

std::size_t Decomposition::peak_position() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < std::min(period, seasonal.size()); ++k) {
        if (seasonal[k] > seasonal[best]) best = k;
    }
    return best;
}

double seasonal_strength(const Decomposition &dec) {
    Series sr(dec.seasonal.size());
    for (std::size_t t = 0; t < sr.size(); ++t) sr[t] = dec.seasonal[t] + dec.remainder[t];
    const double denom = variance(sr);
    if (denom <= 0.0) return 0.0;
    return std::max(0.0, 1.0 - variance(dec.remainder) / denom);
}

std::vector<LagCorrelation> cross_correlation(std::span<const double> a, std::span<const double> b, int max_lag) {
    if (a.size() != b.size()) throw std::invalid_argument("cross_correlation: series lengths differ");
    if (max_lag < 0) throw std::invalid_argument("cross_correlation: max_lag must be non-negative");
    const std::size_t n = a.size();
    if (n <= static_cast<std::size_t>(max_lag) + 2) {
        throw std::invalid_argument("cross_correlation: series too short for max_lag");
    }
    const double ma = mean(a), mb = mean(b);
    if (variance(a) == 0.0 || variance(b) == 0.0) throw DataError("cross_correlation: a series has zero variance");
    std::vector<LagCorrelation> out;
    out.reserve(static_cast<std::size_t>(2 * max_lag + 1));
    for (int k = -max_lag; k <= max_lag; ++k) {
        double sab = 0.0, saa = 0.0, sbb = 0.0;
        const std::size_t shift = static_cast<std::size_t>(std::abs(k));
        for (std::size_t t = 0; t + shift < n; ++t) {
            const double da = (k >= 0 ? a[t] : a[t + shift]) - ma;
            const double db = (k >= 0 ? b[t + shift] : b[t]) - mb;
            sab += da * db;
            saa += da * da;
            sbb += db * db;
        }
        out.push_back({k, saa > 0.0 && sbb > 0.0 ? sab / std::sqrt(saa * sbb) : 0.0});
    }
    return out;
}

std::vector<double> differencing_polynomial(int d, int D, int s) {
    if (d < 0 || D < 0 || s < 1) throw std::invalid_argument("differencing_polynomial: invalid orders");
    std::vector<double> poly{1.0};
    auto multiply = [&](int lag) {
        std::vector<double> next(poly.size() + static_cast<std::size_t>(lag), 0.0);
        for (std::size_t j = 0; j < poly.size(); ++j) {
            next[j] += poly[j];
            next[j + static_cast<std::size_t>(lag)] -= poly[j];
        }
        poly = std::move(next);
    };
    for (int i = 0; i < d; ++i) multiply(1);
    for (int i = 0; i < D; ++i) multiply(s);
    return poly;
}

Series difference(std::span<const double> x, int d, int D, int s) {
    const auto poly = differencing_polynomial(d, D, s);
    const std::size_t order = poly.size() - 1;
    if (x.size() <= order) {
        throw DataError("difference: series of length " + std::to_string(x.size()) + " too short for order " +
                        std::to_string(order));
    }
    Series out(x.size() - order);
    for (std::size_t t = order; t < x.size(); ++t) {
        double v = 0.0;
        for (std::size_t j = 0; j <= order; ++j) v += poly[j] * x[t - j];
        out[t - order] = v;
    }
    return out;
}

Series undifference(std::span<const double> differenced, std::span<const double> initial, int d, int D, int s) {
    const auto poly = differencing_polynomial(d, D, s);
    const std::size_t order = poly.size() - 1;
    if (initial.size() != order) throw std::invalid_argument("undifference: need exactly d + D*s initial values");
    Series x(initial.begin(), initial.end());
    x.reserve(order + differenced.size());
    for (double w : differenced) {
        const std::size_t t = x.size();
        double v = w;
        for (std::size_t j = 1; j <= order; ++j) v -= poly[j] * x[t - j];
        x.push_back(v);
    }
    return x;
}

double kpss_statistic(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 4) throw std::invalid_argument("kpss_statistic: series too short");
    const double m = mean(x);
    std::vector<double> e(n);
    for (std::size_t t = 0; t < n; ++t) e[t] = x[t] - m;
    const auto lags = static_cast<std::size_t>(std::trunc(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    auto autocov = [&](std::size_t j) {
        double s = 0.0;
        for (std::size_t t = j; t < n; ++t) s += e[t] * e[t - j];
        return s / static_cast<double>(n);
    };
    double long_run = autocov(0);
    for (std::size_t j = 1; j <= lags && j < n; ++j) {
        long_run += 2.0 * (1.0 - static_cast<double>(j) / static_cast<double>(lags + 1)) * autocov(j);
    }
    if (long_run <= 0.0) return 0.0;
    double partial = 0.0, total = 0.0;
    for (double v : e) {
        partial += v;
        total += partial * partial;
    }
    return total / (static_cast<double>(n) * static_cast<double>(n) * long_run);
}

} // namespace hdcast::tsa
