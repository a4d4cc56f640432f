#include "hdcast/evaluation.hpp"

#include "hdcast/linear.hpp"
#include "hdcast/parallel.hpp"
#include "hdcast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hdcast::evaluation {

Split split_train_test(const DesignMatrix &dm, double fraction, SplitMode mode, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("split_train_test: fraction must be in (0, 1)");
    const std::size_t n = dm.rows();
    const auto train_n = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
    if (train_n < 2) throw std::invalid_argument("split_train_test: training part would have fewer than 2 rows");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (mode == SplitMode::random) {
        Rng rng(seed);
        rng.shuffle(order);
    }
    Split s;
    s.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_n));
    s.test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(train_n), order.end());
    std::sort(s.train_rows.begin(), s.train_rows.end());
    std::sort(s.test_rows.begin(), s.test_rows.end());
    s.train = dm.select_rows(s.train_rows);
    s.test = dm.select_rows(s.test_rows);
    return s;
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) throw std::invalid_argument("mape: lengths differ");
    if (actual.empty()) throw std::invalid_argument("mape: empty input");
    double total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) throw DataError("mape: actual value at index " + std::to_string(i) + " is zero");
        total += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
    }
    return 100.0 * total / static_cast<double>(actual.size());
}

double mape(const Eigen::VectorXd &actual, const Eigen::VectorXd &predicted) {
    return mape(std::span<const double>(actual.data(), static_cast<std::size_t>(actual.size())),
                std::span<const double>(predicted.data(), static_cast<std::size_t>(predicted.size())));
}

Eigen::VectorXd to_report_scale(const Eigen::VectorXd &v, TargetScale scale) {
    if (scale == TargetScale::identity) return v;
    return v.array().max(0.0).square();
}

std::vector<std::size_t> fold_sizes(std::size_t n, std::size_t k) {
    if (k < 2 || n < k) throw std::invalid_argument("kfold: need 2 <= k <= rows");
    std::vector<std::size_t> sizes(k, n / k);
    for (std::size_t f = 0; f < n % k; ++f) ++sizes[f];
    return sizes;
}

CvResult kfold_cv(const DesignMatrix &dm, std::size_t k, const Fitter &fitter, std::uint64_t seed, TargetScale scale) {
    const auto sizes = fold_sizes(dm.rows(), k);
    std::vector<std::size_t> order(dm.rows());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<std::vector<std::size_t>> held(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        held[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                       order.begin() + static_cast<std::ptrdiff_t>(pos + sizes[f]));
        std::sort(held[f].begin(), held[f].end());
        pos += sizes[f];
    }
    CvResult out;
    out.folds.resize(k);
    parallel_for(k, [&](std::size_t f) {
        auto &res = out.folds[f];
        res.fold = f;
        res.size = held[f].size();
        std::vector<bool> is_test(dm.rows(), false);
        for (auto r : held[f]) is_test[r] = true;
        std::vector<std::size_t> train_rows;
        for (std::size_t r = 0; r < dm.rows(); ++r) {
            if (!is_test[r]) train_rows.push_back(r);
        }
        try {
            const DesignMatrix test = dm.select_rows(held[f]);
            const Eigen::VectorXd pred = fitter(dm.select_rows(train_rows), test);
            const Eigen::VectorXd a = to_report_scale(test.target, scale);
            const Eigen::VectorXd p = to_report_scale(pred, scale);
            res.mape = mape(a, p);
            res.r2 = linear::r_squared(a, p);
            res.ok = true;
        } catch (const std::exception &e) {
            res.message = e.what();
        }
    });
    std::size_t ok = 0;
    for (const auto &f : out.folds) {
        if (!f.ok) {
            ++out.failed;
            continue;
        }
        ++ok;
        out.mean_r2 += f.r2;
        out.mean_mape += f.mape;
    }
    if (ok == 0) throw ModelError("kfold_cv: every fold failed: " + out.folds.front().message);
    out.mean_r2 /= static_cast<double>(ok);
    out.mean_mape /= static_cast<double>(ok);
    return out;
}

RollingResult rolling_origin(std::span<const double> y, const Forecaster &forecaster, int h, std::size_t min_train) {
    if (h < 1) throw std::invalid_argument("rolling_origin: horizon must be >= 1");
    const auto hs = static_cast<std::size_t>(h);
    if (min_train < 1 || y.size() < min_train + hs) {
        throw std::invalid_argument("rolling_origin: series length " + std::to_string(y.size()) +
                                    " is shorter than min_train + h");
    }
    const std::size_t count = y.size() - hs - min_train + 1;
    RollingResult out;
    out.horizon = h;
    out.origins.resize(count);
    parallel_for(count, [&](std::size_t i) {
        auto &o = out.origins[i];
        o.train_size = min_train + i;
        o.actual.assign(y.begin() + static_cast<std::ptrdiff_t>(o.train_size),
                        y.begin() + static_cast<std::ptrdiff_t>(o.train_size + hs));
        try {
            o.forecast = forecaster(y.first(o.train_size), h);
            if (o.forecast.size() != hs) throw ModelError("forecaster returned the wrong number of steps");
            o.ok = true;
        } catch (const std::exception &e) {
            o.message = e.what();
        }
    });
    out.mape_by_step.assign(hs, 0.0);
    std::size_t ok = 0;
    for (const auto &o : out.origins) {
        if (!o.ok) {
            ++out.failed;
            continue;
        }
        ++ok;
        for (std::size_t k = 0; k < hs; ++k) {
            if (o.actual[k] == 0.0) throw DataError("rolling_origin: zero actual value");
            out.mape_by_step[k] += std::abs(o.actual[k] - o.forecast[k]) / std::abs(o.actual[k]);
        }
    }
    if (ok == 0) throw ModelError("rolling_origin: every origin failed: " + out.origins.front().message);
    for (auto &m : out.mape_by_step) m *= 100.0 / static_cast<double>(ok);
    out.mape_at_h = out.mape_by_step.back();
    out.mape_mean = std::accumulate(out.mape_by_step.begin(), out.mape_by_step.end(), 0.0) / static_cast<double>(hs);
    return out;
}

Baselines baseline_forecasts(std::span<const double> y, int h, std::size_t window) {
    if (y.empty()) throw std::invalid_argument("baseline_forecasts: empty series");
    if (h < 1) throw std::invalid_argument("baseline_forecasts: horizon must be >= 1");
    if (window < 1) throw std::invalid_argument("baseline_forecasts: window must be >= 1");
    const std::size_t w = std::min(window, y.size());
    const double avg = std::accumulate(y.end() - static_cast<std::ptrdiff_t>(w), y.end(), 0.0) / static_cast<double>(w);
    Baselines b;
    b.constant.assign(static_cast<std::size_t>(h), y.back());
    b.mean.assign(static_cast<std::size_t>(h), avg);
    return b;
}

} // namespace hdcast::evaluation
