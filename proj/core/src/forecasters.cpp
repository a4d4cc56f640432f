#include "hdcast/forecasters.hpp"

#include <cmath>

namespace hdcast::forecasters {

std::vector<arima::ArimaSpec> seasonal_family(int max_p, int max_q, int s) {
    std::vector<arima::ArimaSpec> grid;
    for (int p = 0; p <= max_p; ++p) {
        for (int q = 0; q <= max_q; ++q) {
            arima::ArimaSpec spec;
            spec.p = p;
            spec.d = 1;
            spec.q = q;
            spec.D = 1;
            spec.s = s;
            grid.push_back(spec);
        }
    }
    return grid;
}

evaluation::Forecaster constant_baseline() {
    return [](std::span<const double> train, int h) { return evaluation::baseline_forecasts(train, h).constant; };
}

evaluation::Forecaster mean_baseline(std::size_t window) {
    return [window](std::span<const double> train, int h) {
        return evaluation::baseline_forecasts(train, h, window).mean;
    };
}

namespace {

Series sqrt_series(std::span<const double> v) {
    Series out;
    out.reserve(v.size());
    for (double x : v) out.push_back(std::sqrt(std::max(0.0, x)));
    return out;
}

} // namespace

evaluation::Forecaster univariate_arima(std::vector<arima::ArimaSpec> grid, arima::FitOptions fit) {
    fit.transform = arima::Transform::sqrt;
    return [grid = std::move(grid), fit](std::span<const double> train, int h) {
        const Series y = sqrt_series(train);
        const auto sel = arima::auto_select(y, nullptr, grid.empty() ? arima::default_grid(y, nullptr) : grid, fit);
        return arima::forecast(sel.best, h).point;
    };
}

indices::IndexSeries head(const indices::IndexSeries &idx, std::size_t n) {
    if (n > idx.size()) throw std::invalid_argument("index series head: n exceeds length");
    indices::IndexSeries out;
    out.rows.assign(idx.rows.begin(), idx.rows.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

ArimaxData arimax_data(const indices::IndexSeries &idx, const ingest::WeeklySeries &weekly, const tsa::LagSpec &lags,
                       std::size_t t) {
    ArimaxData d;
    d.idx = head(idx, t);
    const auto dm = tsa::build_design_matrix(d.idx, weekly.head(t), lags);
    d.y.assign(dm.target.data(), dm.target.data() + dm.target.size());
    d.xreg = dm;
    d.xreg.target.resize(0);
    return d;
}

arima::XregFuture arimax_future(const indices::IndexSeries &idx, const tsa::LagSpec &lags, int h,
                                arima::FillMode fill, const std::vector<arima::ArimaSpec> &si_grid,
                                const arima::FitOptions &fit) {
    if (fill == arima::FillMode::persistence) return arima::lagged_xreg_future(idx, lags, h);
    const Series si = idx.si();
    arima::FitOptions si_fit = fit;
    si_fit.transform = arima::Transform::none;
    const auto sel = arima::auto_select(si, nullptr, si_grid.empty() ? arima::default_grid(si, nullptr) : si_grid, si_fit);
    const Series path = arima::forecast(sel.best, h).point;
    return arima::lagged_xreg_future(idx, lags, h, &path);
}

evaluation::Forecaster arimax(indices::IndexSeries idx, ingest::WeeklySeries weekly, ArimaxSetup setup) {
    setup.fit.transform = arima::Transform::sqrt;
    return [idx = std::move(idx), weekly = std::move(weekly), setup](std::span<const double> train, int h) {
        const auto data = arimax_data(idx, weekly, setup.lags, train.size());
        const auto grid = setup.grid.empty() ? arima::default_grid(data.y, &data.xreg) : setup.grid;
        const auto sel = arima::auto_select(data.y, &data.xreg, grid, setup.fit);
        const auto future = arimax_future(data.idx, setup.lags, h, setup.fill, setup.si_grid, setup.fit);
        return arima::forecast(sel.best, h, &future.matrix).point;
    };
}

evaluation::Forecaster harmonic(indices::IndexSeries idx, ingest::WeeklySeries weekly, HarmonicSetup setup) {
    setup.options.fit.transform = arima::Transform::sqrt;
    return [idx = std::move(idx), weekly = std::move(weekly), setup](std::span<const double> train, int h) {
        const std::size_t t = train.size();
        if (setup.lags.empty()) {
            const Series y = sqrt_series(train);
            const auto fit = arima::fit_harmonic(y, nullptr, setup.options, 1);
            return arima::forecast_harmonic(fit, h).point;
        }
        const auto data = arimax_data(idx, weekly, setup.lags, t);
        const auto fit = arima::fit_harmonic(data.y, &data.xreg, setup.options,
                                             static_cast<std::size_t>(setup.lags.max_lag()) + 1);
        const auto future = arima::lagged_xreg_future(data.idx, setup.lags, h);
        return arima::forecast_harmonic(fit, h, &future.matrix).point;
    };
}

} // namespace hdcast::forecasters
