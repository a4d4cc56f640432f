#include "hdcast/harmonic.hpp"

#include <limits>

namespace hdcast::arima {

DesignMatrix harmonic_regressors(std::size_t n, int harmonics, double period, bool trend, std::size_t first_t,
                                 const DesignMatrix *extra) {
    DesignMatrix dm = tsa::fourier_terms(n, harmonics, period, first_t);
    if (trend) {
        DesignMatrix t;
        t.columns = {"trend"};
        t.x.resize(static_cast<Eigen::Index>(n), 1);
        for (std::size_t i = 0; i < n; ++i) t.x(static_cast<Eigen::Index>(i), 0) = static_cast<double>(first_t + i);
        t.time_index = dm.time_index;
        dm = dm.hcat(t);
    }
    if (extra && extra->cols() > 0) {
        if (extra->rows() != n) throw std::invalid_argument("harmonic_regressors: extra regressors misaligned");
        DesignMatrix e = *extra;
        e.target.resize(0);
        e.time_index = dm.time_index;
        dm = dm.hcat(e);
    }
    return dm;
}

HarmonicFit fit_harmonic(std::span<const double> y, const DesignMatrix *extra, const HarmonicOptions &options,
                         std::size_t first_t) {
    if (options.min_harmonics < 1 || options.max_harmonics < options.min_harmonics) {
        throw std::invalid_argument("fit_harmonic: need 1 <= min_harmonics <= max_harmonics");
    }
    std::vector<ArimaSpec> grid;
    for (int p = 0; p <= options.max_p; ++p) {
        for (int q = 0; q <= options.max_q; ++q) {
            ArimaSpec s;
            s.p = p;
            s.q = q;
            grid.push_back(s);
        }
    }
    HarmonicFit best;
    double best_aicc = std::numeric_limits<double>::infinity();
    std::string last_error;
    for (int k = options.min_harmonics; k <= options.max_harmonics && 2.0 * k < options.period; ++k) {
        const DesignMatrix x = harmonic_regressors(y.size(), k, options.period, options.trend, first_t, extra);
        try {
            auto sel = auto_select(y, &x, grid, options.fit);
            best.aicc_by_k.emplace_back(k, sel.best.aicc);
            if (sel.best.aicc < best_aicc) {
                best_aicc = sel.best.aicc;
                best.model = std::move(sel.best);
                best.harmonics = k;
            }
        } catch (const ModelError &e) {
            last_error = e.what();
        }
    }
    if (best.harmonics == 0) throw ModelError("fit_harmonic: no harmonic model could be fitted: " + last_error);
    best.period = options.period;
    best.trend = options.trend;
    best.first_t = first_t;
    if (extra) best.extra_names = extra->columns;
    return best;
}

Forecast forecast_harmonic(const HarmonicFit &fit, int h, const DesignMatrix *extra_future, double level) {
    if (!fit.extra_names.empty() && !extra_future) {
        throw ModelError("forecast_harmonic: model uses extra regressors but no future values were supplied");
    }
    DesignMatrix extra;
    if (!fit.extra_names.empty()) {
        extra.columns = fit.extra_names;
        extra.x = extra_future->select(fit.extra_names);
    }
    const DesignMatrix x = harmonic_regressors(static_cast<std::size_t>(h), fit.harmonics, fit.period, fit.trend,
                                               fit.first_t + fit.model.y.size(),
                                               fit.extra_names.empty() ? nullptr : &extra);
    return forecast(fit.model, h, &x, level);
}

} // namespace hdcast::arima
