#include "models.hpp"

#include "hdcast/ensemble.hpp"
#include "hdcast/forecasters.hpp"
#include "hdcast/harmonic.hpp"
#include "hdcast/lasso.hpp"
#include "hdcast/linear.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace hdcast::cli {

void SplitOptions::add_to(CLI::App *sub) {
    sub->add_option("--split", mode, "Train/test split: random, chronological or none")
        ->check(CLI::IsMember({"random", "chronological", "none"}))
        ->capture_default_str();
    sub->add_option("--fraction", fraction, "Training share of the rows")
        ->check(CLI::Range(0.05, 0.95))
        ->capture_default_str();
    sub->add_option("--seed", seed, "Seed for the random split and model initialisation")->capture_default_str();
}

Json SplitOptions::to_json() const { return Json{{"mode", mode}, {"fraction", fraction}, {"seed", seed}}; }

SplitOptions SplitOptions::from_json(const Json &j) {
    try {
        SplitOptions s;
        s.mode = j.at("mode").get<std::string>();
        s.fraction = j.at("fraction").get<double>();
        s.seed = j.at("seed").get<std::uint64_t>();
        return s;
    } catch (const nlohmann::json::exception &e) {
        throw DataError(std::string("model artifact has a malformed split block: ") + e.what());
    }
}

evaluation::Split SplitOptions::apply(const DesignMatrix &dm) const {
    if (mode == "none") {
        evaluation::Split s;
        s.train = dm;
        for (std::size_t i = 0; i < dm.rows(); ++i) s.train_rows.push_back(i);
        s.test = dm.tail_from(dm.rows());
        return s;
    }
    return evaluation::split_train_test(
        dm, fraction, mode == "random" ? evaluation::SplitMode::random : evaluation::SplitMode::chronological, seed);
}

bool is_regression(const std::string &kind) { return kind == "stepwise" || kind == "lasso" || kind == "ensemble"; }
bool is_time_series(const std::string &kind) { return kind == "regarima" || kind == "harmonic"; }

namespace {

template <class T>
T option_or(const Json &options, const char *key, T fallback) {
    return options.contains(key) ? options.at(key).get<T>() : fallback;
}

Json fit_stepwise(const Json &options, const DesignMatrix &train) {
    linear::StepwiseOptions so;
    so.criterion = option_or<std::string>(options, "criterion", "aic") == "pvalue" ? linear::StepCriterion::pvalue
                                                                                    : linear::StepCriterion::aic;
    so.alpha = option_or(options, "alpha", 0.05);
    Json j = artifacts::to_json(linear::forward_stepwise(train, so));
    j["options"] = Json{{"criterion", so.criterion == linear::StepCriterion::aic ? "aic" : "pvalue"}, {"alpha", so.alpha}};
    return j;
}

Json fit_lasso(const Json &options, const DesignMatrix &train) {
    const std::string mode_text = option_or<std::string>(options, "mode", "lasso");
    const auto mode = mode_text == "lar" ? lasso::PathMode::lar : lasso::PathMode::lasso;
    const auto path = lasso::lar_path(train, mode);
    Json selection = nullptr;
    double fraction = 0.0;
    double lambda = 0.0;
    if (options.contains("lambda_fraction")) {
        fraction = options.at("lambda_fraction").get<double>();
        lambda = fraction * path.lambda_max();
    } else if (options.contains("lambda")) {
        lambda = options.at("lambda").get<double>();
        fraction = lambda / path.lambda_max();
    } else {
        const auto min_train = option_or<std::size_t>(options, "min_train", std::max<std::size_t>(20, train.rows() / 2));
        const auto grid = option_or<std::size_t>(options, "grid_size", 40);
        const auto sel = lasso::select_lambda_rolling(train, mode, min_train, grid);
        fraction = sel.fraction;
        lambda = sel.lambda;
        selection = Json{{"min_train", min_train}, {"fractions", sel.fractions}, {"mapes", sel.mapes},
                         {"mape", sel.mape}};
    }
    const auto coef = lasso::coefficients_at(path, lambda);
    Json j;
    j["model"] = "lasso";
    j["mode"] = mode_text;
    j["lambda"] = lambda;
    j["lambda_fraction"] = fraction;
    j["coefficients"] = artifacts::to_json(coef);
    j["selection"] = selection;
    j["path"] = artifacts::to_json(path);
    j["options"] = Json{{"mode", mode_text}, {"lambda_fraction", fraction}};
    return j;
}

Json fit_ensemble_model(const Json &options, const DesignMatrix &train, const DesignMatrix *test) {
    ensemble::EnsembleOptions eo;
    const auto tuning = option_or<std::string>(options, "tuning", "validation");
    eo.tuning = tuning == "fixed"  ? ensemble::WeightTuning::fixed
                : tuning == "test" ? ensemble::WeightTuning::test
                                   : ensemble::WeightTuning::validation;
    eo.grid_step = option_or(options, "grid_step", eo.grid_step);
    eo.cart_depth = option_or(options, "cart_depth", eo.cart_depth);
    eo.cart_min_leaf = option_or(options, "cart_min_leaf", eo.cart_min_leaf);
    eo.mlp.hidden = option_or(options, "hidden", eo.mlp.hidden);
    eo.mlp.epochs = option_or(options, "epochs", eo.mlp.epochs);
    eo.mlp.learn_rate = option_or(options, "learn_rate", eo.mlp.learn_rate);
    eo.seed = option_or<std::uint64_t>(options, "seed", eo.seed);
    eo.mlp.seed = eo.seed;
    const auto fit = ensemble::fit_ensemble(train, eo, test);
    Json j = artifacts::to_json(fit.model);
    j["tuned_on"] = fit.tuned_on;
    j["tuning_adj_r2"] = fit.tuning_adj_r2;
    Json o = options;
    o["tuning"] = tuning == "test" ? "fixed" : tuning; // refits cannot see a test set
    j["options"] = o;
    return j;
}

} // namespace

Json fit_regression(const std::string &kind, const Json &options, const DesignMatrix &train, const DesignMatrix *test) {
    if (kind == "stepwise") return fit_stepwise(options, train);
    if (kind == "lasso") return fit_lasso(options, train);
    if (kind == "ensemble") return fit_ensemble_model(options, train, test);
    throw std::invalid_argument("not a regression model kind: " + kind);
}

Json fit_regression_pipeline(const std::string &kind, const Json &options, const ingest::WeeklySeries &weekly,
                             const tsa::LagSpec &lags, const SplitOptions &split) {
    const auto dm = design_for(weekly, lags);
    const auto parts = split.apply(dm);
    Json model = fit_regression(kind, options, parts.train, parts.test.rows() ? &parts.test : nullptr);
    model["pipeline"] = Json{{"target", "hdi_sqrt"},
                             {"lags", lag_json(lags)},
                             {"split", split.to_json()},
                             {"design_rows", dm.rows()},
                             {"train_rows", parts.train_rows}};
    return model;
}

Eigen::VectorXd predict_regression(const Json &model, const DesignMatrix &dm) {
    const auto kind = artifacts::model_kind(model);
    if (kind == "stepwise") return linear::predict(artifacts::linear_from_json(model), dm);
    if (kind == "ensemble") return ensemble::predict_ensemble(artifacts::ensemble_from_json(model), dm);
    if (kind == "lasso") {
        const auto path = artifacts::lar_path_from_json(model.at("path"));
        return lasso::predict(lasso::coefficients_at(path, model.at("lambda").get<double>()), dm);
    }
    throw DataError("model kind '" + kind + "' is not a regression on a lagged design");
}

Json refit_options(const Json &model) {
    if (!model.contains("options")) throw DataError("model artifact lacks its fitting options");
    return model.at("options");
}

std::size_t predictor_count(const Json &model) {
    const auto kind = artifacts::model_kind(model);
    if (kind == "stepwise") return artifacts::linear_from_json(model).p;
    if (kind == "lasso") {
        std::size_t k = 0;
        for (const auto &[name, v] : model.at("coefficients").at("coefficients").items()) k += v.get<double>() != 0.0;
        return k;
    }
    return artifacts::ensemble_from_json(model).mlp.columns.size();
}

int forecast_reach(const tsa::LagSpec &lags) {
    int reach = std::numeric_limits<int>::max();
    for (int k : lags.si_lags) {
        if (k > 0) reach = std::min(reach, k);
    }
    for (int k : lags.hdi_lags) reach = std::min(reach, k);
    return reach == std::numeric_limits<int>::max() ? 0 : reach;
}

arima::Forecast forecast_regression(const Json &model, const ingest::WeeklySeries &weekly, int h) {
    const auto lags = lag_from_json(model.at("pipeline").at("lags"));
    const int reach = forecast_reach(lags);
    if (h < 1 || h > reach) {
        throw std::invalid_argument("regression models forecast directly; horizon must be in 1.." +
                                    std::to_string(reach));
    }
    const auto idx = indices::compute_indices(weekly);
    const std::size_t n = idx.size();
    if (static_cast<std::size_t>(lags.max_lag()) >= n) throw DataError("weekly series is shorter than the largest lag");
    DesignMatrix dm;
    dm.columns = lags.column_names();
    dm.x.resize(h, static_cast<Eigen::Index>(dm.columns.size()));
    std::vector<std::string> fills;
    ingest::WeekKey week{weekly.records.back().year, weekly.records.back().week};
    for (int i = 0; i < h; ++i) {
        const std::size_t t = n + static_cast<std::size_t>(i);
        week = week.next();
        Eigen::Index c = 0;
        std::string fill;
        for (int k : lags.si_lags) {
            if (k == 0) {
                dm.x(i, c++) = idx.rows.back().si;
                fill = "SI-L0";
            } else {
                dm.x(i, c++) = idx.rows[t - static_cast<std::size_t>(k)].si;
            }
        }
        if (lags.include_median_dom) {
            dm.x(i, c++) = weekly.records.back().median_dom;
            fill += fill.empty() ? "median_dom" : ";median_dom";
        }
        if (lags.include_week) dm.x(i, c++) = week.week;
        for (int k : lags.hdi_lags) dm.x(i, c++) = idx.rows[t - static_cast<std::size_t>(k)].hdi;
        dm.time_index.push_back(t);
        fills.push_back(fill);
    }
    const Eigen::VectorXd pred = predict_regression(model, dm);
    arima::Forecast f;
    f.horizon = h;
    f.level = 0.0;
    for (int i = 0; i < h; ++i) {
        const double v = indices::inverse_transform(pred(i));
        f.point.push_back(v);
        f.lower.push_back(v);
        f.upper.push_back(v);
        f.model_point.push_back(pred(i));
        f.model_se.push_back(0.0);
    }
    f.xreg_fill = fills;
    return f;
}

tsa::LagSpec xreg_lags(const Json &model) {
    const auto &p = model.at("pipeline");
    if (!p.contains("xreg") || p.at("xreg").is_null()) return {};
    return lag_from_json(p.at("xreg"));
}

arima::FillMode parse_fill(const std::string &text) {
    if (text == "persistence") return arima::FillMode::persistence;
    if (text == "si-forecast") return arima::FillMode::si_forecast;
    throw std::invalid_argument("fill must be persistence or si-forecast, got '" + text + "'");
}

namespace {

Series to_model_scale(std::span<const double> hdi, arima::Transform t) {
    Series y(hdi.begin(), hdi.end());
    if (t == arima::Transform::sqrt) {
        for (double &v : y) v = std::sqrt(std::max(0.0, v));
    }
    return y;
}

// sqrt(HDI) targets from the design, squared back when the model is on the HDI scale.
Series design_target(const forecasters::ArimaxData &data, arima::Transform t) {
    Series y = data.y;
    if (t == arima::Transform::none) {
        for (double &v : y) v *= v;
    }
    return y;
}

} // namespace

arima::Forecast forecast_time_series(const Json &model, const ingest::WeeklySeries *weekly, int h, double level,
                                     arima::FillMode fill) {
    const auto kind = artifacts::model_kind(model);
    const auto lags = xreg_lags(model);
    std::optional<arima::XregFuture> future;
    if (!lags.empty()) {
        if (!weekly) throw std::invalid_argument("this model uses lagged SI; pass --weekly");
        const auto train_weeks = model.at("pipeline").at("train_weeks").get<std::size_t>();
        if (weekly->size() < train_weeks) throw DataError("weekly series is shorter than the model's training window");
        const auto idx = forecasters::head(indices::compute_indices(*weekly), train_weeks);
        future = forecasters::arimax_future(idx, lags, h, fill, {}, {});
    }
    arima::Forecast f;
    if (kind == "harmonic") {
        f = arima::forecast_harmonic(artifacts::harmonic_from_json(model), h, future ? &future->matrix : nullptr, level);
    } else if (kind == "regarima") {
        f = arima::forecast(artifacts::regarima_from_json(model), h, future ? &future->matrix : nullptr, level);
    } else {
        throw DataError("model kind '" + kind + "' is not a time-series model");
    }
    if (future) f.xreg_fill = future->step_labels();
    return f;
}

evaluation::Forecaster time_series_forecaster(const Json &model, const ingest::WeeklySeries &weekly,
                                              arima::FillMode fill) {
    const auto kind = artifacts::model_kind(model);
    const auto lags = xreg_lags(model);
    const auto idx = indices::compute_indices(weekly);
    if (kind == "regarima") {
        const auto fit = artifacts::regarima_from_json(model);
        arima::FitOptions opts;
        opts.transform = fit.transform;
        opts.include_mean = fit.has_mean || fit.spec.diff_order() > 0;
        const auto spec = fit.spec;
        return [=](std::span<const double> train, int h) {
            if (lags.empty()) {
                return arima::forecast(arima::fit_regarima(to_model_scale(train, opts.transform), spec, opts), h).point;
            }
            const auto data = forecasters::arimax_data(idx, weekly, lags, train.size());
            const auto f = arima::fit_regarima(design_target(data, opts.transform), data.xreg, spec, opts);
            const auto future = forecasters::arimax_future(data.idx, lags, h, fill, {}, opts);
            return arima::forecast(f, h, &future.matrix).point;
        };
    }
    if (kind == "harmonic") {
        const auto fit = artifacts::harmonic_from_json(model);
        arima::HarmonicOptions ho;
        ho.min_harmonics = ho.max_harmonics = fit.harmonics;
        ho.period = fit.period;
        ho.trend = fit.trend;
        ho.max_p = fit.model.spec.p;
        ho.max_q = fit.model.spec.q;
        ho.fit.transform = fit.model.transform;
        return [=](std::span<const double> train, int h) {
            if (lags.empty()) {
                const auto f = arima::fit_harmonic(to_model_scale(train, ho.fit.transform), nullptr, ho, 1);
                return arima::forecast_harmonic(f, h).point;
            }
            const auto data = forecasters::arimax_data(idx, weekly, lags, train.size());
            const auto f = arima::fit_harmonic(design_target(data, ho.fit.transform), &data.xreg, ho,
                                               static_cast<std::size_t>(lags.max_lag()) + 1);
            const auto future = forecasters::arimax_future(data.idx, lags, h, fill, {}, ho.fit);
            return arima::forecast_harmonic(f, h, &future.matrix).point;
        };
    }
    throw DataError("model kind '" + kind + "' is not a time-series model");
}

double pooled_r2(const evaluation::RollingResult &r, std::size_t *count) {
    std::vector<double> actual, predicted;
    for (const auto &o : r.origins) {
        if (!o.ok) continue;
        actual.insert(actual.end(), o.actual.begin(), o.actual.end());
        predicted.insert(predicted.end(), o.forecast.begin(), o.forecast.end());
    }
    if (count) *count = actual.size();
    return linear::r_squared(Eigen::Map<const Eigen::VectorXd>(actual.data(), static_cast<Eigen::Index>(actual.size())),
                             Eigen::Map<const Eigen::VectorXd>(predicted.data(),
                                                               static_cast<Eigen::Index>(predicted.size())));
}

namespace {

void add_baselines(evaluation::EvalReport &report, const Series &hdi, int h, std::size_t min_train) {
    const auto constant = evaluation::rolling_origin(hdi, forecasters::constant_baseline(), h, min_train);
    const auto mean = evaluation::rolling_origin(hdi, forecasters::mean_baseline(), h, min_train);
    report.baseline_mapes["constant"] = constant.mape_mean;
    report.baseline_mapes["mean"] = mean.mape_mean;
    report.baseline_mapes_at_h["constant"] = constant.mape_at_h;
    report.baseline_mapes_at_h["mean"] = mean.mape_at_h;
}

void check_window(std::size_t n, int h, std::size_t min_train) {
    if (h < 1) throw std::invalid_argument("horizon must be positive");
    if (min_train < 1 || min_train + static_cast<std::size_t>(h) > n) {
        throw std::invalid_argument("need min-train + horizon <= " + std::to_string(n) + " weeks");
    }
}

} // namespace

evaluation::EvalReport rolling_report(const std::string &name, const evaluation::Forecaster &forecaster,
                                      const ingest::WeeklySeries &weekly, int h, std::size_t min_train,
                                      int n_params) {
    const Series hdi = indices::compute_indices(weekly).hdi();
    check_window(hdi.size(), h, min_train);
    const auto rolling = evaluation::rolling_origin(hdi, forecaster, h, min_train);
    evaluation::EvalReport report;
    report.model = name;
    report.split = "rolling-origin";
    report.horizon = h;
    report.mape = rolling.mape_mean;
    report.mape_at_h = rolling.mape_at_h;
    report.mape_by_step = rolling.mape_by_step;
    std::size_t pooled = 0;
    report.r2 = pooled_r2(rolling, &pooled);
    const auto p = static_cast<std::size_t>(std::max(0, n_params - 1)); // sigma2 is not a predictor
    report.adj_r2 = n_params > 0 && pooled > p + 1 ? linear::adjusted_r_squared(report.r2, pooled, p) : report.r2;
    add_baselines(report, hdi, h, min_train);
    return report;
}

evaluation::EvalReport evaluate_time_series(const Json &model, const ingest::WeeklySeries &weekly, int h,
                                            std::size_t min_train, arima::FillMode fill) {
    const bool harmonic = artifacts::model_kind(model) == "harmonic";
    const std::string name = harmonic ? "harmonic" : (xreg_lags(model).empty() ? "arima" : "arimax");
    const int k = (harmonic ? model.at("regarima") : model).at("n_params").get<int>();
    return rolling_report(name, time_series_forecaster(model, weekly, fill), weekly, h, min_train, k);
}

evaluation::EvalReport evaluate_regression(const Json &model, const ingest::WeeklySeries &weekly, int h,
                                           std::size_t min_train, std::size_t folds, std::uint64_t cv_seed) {
    const auto kind = artifacts::model_kind(model);
    const auto &pipeline = model.at("pipeline");
    const auto lags = lag_from_json(pipeline.at("lags"));
    const auto split = SplitOptions::from_json(pipeline.at("split"));
    const auto dm = design_for(weekly, lags);
    const auto parts = split.apply(dm);
    if (parts.train_rows != pipeline.at("train_rows").get<std::vector<std::size_t>>()) {
        throw DataError("weekly data does not reproduce the model's training rows; evaluate on the series it was fitted to");
    }
    evaluation::EvalReport report;
    report.model = kind;
    report.split = split.mode;
    report.horizon = h > 0 ? h : forecast_reach(lags);
    if (parts.test.rows() > 0) {
        const Eigen::VectorXd pred = evaluation::to_report_scale(predict_regression(model, parts.test),
                                                                 evaluation::TargetScale::sqrt);
        const Eigen::VectorXd actual = evaluation::to_report_scale(parts.test.target, evaluation::TargetScale::sqrt);
        report.mape = evaluation::mape(actual, pred);
        report.mape_at_h = report.mape;
        report.r2 = linear::r_squared(actual, pred);
        const std::size_t p = predictor_count(model);
        report.adj_r2 = actual.size() > static_cast<Eigen::Index>(p) + 1
                            ? linear::adjusted_r_squared(report.r2, static_cast<std::size_t>(actual.size()), p)
                            : 0.0;
    }
    if (folds > 1) {
        const Json options = refit_options(model);
        const auto cv = evaluation::kfold_cv(
            dm, folds,
            [&](const DesignMatrix &train, const DesignMatrix &test) {
                return predict_regression(fit_regression(kind, options, train), test);
            },
            cv_seed);
        report.folds = cv.folds;
        if (parts.test.rows() == 0) {
            report.mape = report.mape_at_h = cv.mean_mape;
            report.r2 = cv.mean_r2;
        }
    }
    const Series hdi = indices::compute_indices(weekly).hdi();
    check_window(hdi.size(), report.horizon, min_train);
    add_baselines(report, hdi, report.horizon, min_train);
    return report;
}

} // namespace hdcast::cli
