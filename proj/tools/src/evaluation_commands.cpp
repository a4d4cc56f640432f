#include "commands.hpp"
#include "models.hpp"

#include "hdcast/forecasters.hpp"
#include "hdcast/harmonic.hpp"
#include "hdcast/parallel.hpp"
#include "hdcast/tsa.hpp"

#include <cmath>
#include <memory>
#include <ostream>

namespace hdcast::cli {

namespace {

void add_forecast(CLI::App &app, Io io) {
    struct Opts {
        std::string model, weekly, out, fill = "persistence";
        int horizon = 20;
        double level = 95.0;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("forecast", "Forecast HDI from a fitted model");
    sub->add_option("--model", o->model, "Model JSON")->required();
    sub->add_option("--weekly", o->weekly, "Weekly CSV (needed for lagged predictors)");
    sub->add_option("--horizon", o->horizon, "Weeks ahead")->check(CLI::Range(1, 520))->capture_default_str();
    sub->add_option("--level", o->level, "Interval coverage in percent")->check(CLI::Range(1.0, 99.9))->capture_default_str();
    sub->add_option("--fill", o->fill, "Unknown future SI: persistence or si-forecast")
        ->check(CLI::IsMember({"persistence", "si-forecast"}))
        ->capture_default_str();
    sub->add_option("--out", o->out, "Forecast CSV (stdout if omitted)");
    sub->callback([o, sub, io] {
        const Json model = load_json(o->model);
        const auto kind = artifacts::model_kind(model);
        arima::Forecast f;
        if (is_regression(kind)) {
            if (o->weekly.empty()) throw std::invalid_argument("regression models need --weekly");
            f = forecast_regression(model, load_weekly(o->weekly), o->horizon);
        } else if (is_time_series(kind)) {
            std::optional<ingest::WeeklySeries> weekly;
            if (!o->weekly.empty()) weekly = load_weekly(o->weekly);
            f = forecast_time_series(model, weekly ? &*weekly : nullptr, o->horizon, o->level, parse_fill(o->fill));
        } else {
            throw DataError(o->model + ": model kind '" + kind + "' cannot forecast");
        }
        emit(o->out, arima::format_forecast_csv(f), *sub, io);
    });
}

void add_evaluate(CLI::App &app, Io io) {
    struct Opts {
        std::string model, weekly, out, fill = "persistence";
        int horizon = 0;
        std::size_t min_train = 104, folds = 10;
        std::uint64_t seed = 1;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand(
        "evaluate", "Score a model: rolling origin for time-series models, test split and k-fold CV for regressions");
    sub->add_option("--model", o->model, "Model JSON")->required();
    sub->add_option("--weekly", o->weekly, "Weekly CSV")->required();
    sub->add_option("--horizon", o->horizon, "Forecast horizon (0 = 20 weeks, or the direct reach of a regression)")
        ->check(CLI::Range(0, 520))
        ->capture_default_str();
    sub->add_option("--min-train", o->min_train, "Weeks before the first rolling origin")->capture_default_str();
    sub->add_option("--folds", o->folds, "Cross-validation folds for regression models (0 = none)")->capture_default_str();
    sub->add_option("--fill", o->fill, "Unknown future SI: persistence or si-forecast")
        ->check(CLI::IsMember({"persistence", "si-forecast"}))
        ->capture_default_str();
    sub->add_option("--seed", o->seed, "Fold assignment seed")->capture_default_str();
    sub->add_option("--out", o->out, "Report JSON (stdout if omitted)");
    sub->callback([o, sub, io] {
        const Json model = load_json(o->model);
        const auto kind = artifacts::model_kind(model);
        const auto weekly = load_weekly(o->weekly);
        evaluation::EvalReport report;
        if (is_time_series(kind)) {
            report = evaluate_time_series(model, weekly, o->horizon > 0 ? o->horizon : 20, o->min_train,
                                          parse_fill(o->fill));
        } else if (is_regression(kind)) {
            report = evaluate_regression(model, weekly, o->horizon, o->min_train, o->folds, o->seed);
        } else {
            throw DataError(o->model + ": model kind '" + kind + "' cannot be evaluated");
        }
        emit(o->out, artifacts::dump(artifacts::to_json(report)), *sub, io);
    });
}

// ---- report ----

struct ReportOpts {
    std::string weekly, out, fill = "si-forecast";
    int horizon = 20, fourier = 4;
    std::size_t min_train = 104, folds = 10;
    std::uint64_t seed = 1;
};

std::string week_label(const ingest::WeeklyRecord &r) { return std::to_string(r.year) + "," + std::to_string(r.week); }

std::string decomposition_csv(const ingest::WeeklySeries &weekly) {
    const auto showings = tsa::seasonal_decompose(weekly.showings());
    const auto sold = tsa::seasonal_decompose(weekly.sold());
    std::string csv = "year,week,showings,showings_trend,showings_seasonal,sold,sold_trend,sold_seasonal\n";
    for (std::size_t i = 0; i < weekly.size(); ++i) {
        csv += week_label(weekly.records[i]) + ',' + format_double(showings.observed[i]) + ',' +
               format_double(showings.trend[i]) + ',' + format_double(showings.seasonal[i]) + ',' +
               format_double(sold.observed[i]) + ',' + format_double(sold.trend[i]) + ',' +
               format_double(sold.seasonal[i]) + '\n';
    }
    return csv;
}

std::string xcorr_csv(const ingest::WeeklySeries &weekly, Json &summary) {
    const auto cc = tsa::cross_correlation(weekly.showings(), weekly.sold(), 25);
    const double bound = tsa::ccf_significance_bound(weekly.size());
    std::string csv = "lag,correlation,significance_bound\n";
    const tsa::LagCorrelation *best = &cc.front();
    for (const auto &c : cc) {
        csv += std::to_string(c.lag) + ',' + format_double(c.correlation) + ',' + format_double(bound) + '\n';
        if (c.correlation > best->correlation) best = &c;
    }
    summary = Json{{"peak_lag", best->lag}, {"peak_correlation", best->correlation}, {"bound", bound}};
    return csv;
}

// Fit on all but the last h weeks and forecast them, next to both baselines.
std::string holdout_csv(const ingest::WeeklySeries &weekly, const arima::Forecast &f, int h) {
    const Series hdi = indices::compute_indices(weekly).hdi();
    const std::size_t t = hdi.size() - static_cast<std::size_t>(h);
    const auto base = evaluation::baseline_forecasts(std::span(hdi).first(t), h);
    std::string csv = "year,week,actual,point,lower,upper,constant,mean\n";
    for (std::size_t i = 0; i < hdi.size(); ++i) {
        csv += week_label(weekly.records[i]) + ',' + format_double(hdi[i]);
        if (i < t) {
            csv += ",,,,,\n";
            continue;
        }
        const std::size_t k = i - t;
        csv += ',' + format_double(f.point[k]) + ',' + format_double(f.lower[k]) + ',' + format_double(f.upper[k]) +
               ',' + format_double(base.constant[k]) + ',' + format_double(base.mean[k]) + '\n';
    }
    return csv;
}

struct TimeSeriesModels {
    Json arima, arimax, fourier;
};

// Artifacts fitted on the first t weeks, shaped like fit-arima output.
TimeSeriesModels fit_time_series(const ingest::WeeklySeries &weekly, std::size_t t, const ReportOpts &o) {
    const auto head = weekly.head(t);
    const auto idx = indices::compute_indices(head);
    const auto lags = tsa::LagSpec::arimax();
    arima::FitOptions fit;
    fit.transform = arima::Transform::sqrt;
    auto pipeline = [&](const tsa::LagSpec *x) {
        return Json{{"target", "hdi"}, {"transform", "sqrt"}, {"xreg", x ? lag_json(*x) : Json(nullptr)},
                    {"train_weeks", t}};
    };
    TimeSeriesModels m;
    const Series y = idx.hdi_sqrt();
    m.arima = artifacts::to_json(arima::auto_select(y, nullptr, arima::default_grid(y, nullptr), fit).best);
    m.arima["pipeline"] = pipeline(nullptr);

    const auto data = forecasters::arimax_data(idx, head, lags, t);
    m.arimax = artifacts::to_json(arima::auto_select(data.y, &data.xreg, arima::default_grid(data.y, &data.xreg), fit).best);
    m.arimax["pipeline"] = pipeline(&lags);

    arima::HarmonicOptions ho;
    ho.max_harmonics = o.fourier;
    ho.max_p = ho.max_q = 2;
    ho.fit = fit;
    m.fourier = artifacts::to_json(
        arima::fit_harmonic(data.y, &data.xreg, ho, static_cast<std::size_t>(lags.max_lag()) + 1));
    m.fourier["pipeline"] = pipeline(&lags);
    return m;
}

Json comparison_row(const evaluation::EvalReport &r, const std::string &name, const std::string &protocol) {
    return Json{{"model", name},    {"protocol", protocol}, {"horizon", r.horizon},
                {"mape", r.mape},   {"mape_at_h", r.mape_at_h}, {"r2", r.r2},
                {"adj_r2", r.adj_r2}};
}

void add_report(CLI::App &app, Io io) {
    auto o = std::make_shared<ReportOpts>();
    auto *sub = app.add_subcommand("report", "Comparison table and plot-ready series for every model family");
    sub->add_option("--weekly", o->weekly, "Weekly CSV")->required();
    sub->add_option("--out", o->out, "Output directory")->required();
    sub->add_option("--horizon", o->horizon, "Forecast horizon in weeks")->check(CLI::Range(1, 520))->capture_default_str();
    sub->add_option("--min-train", o->min_train, "Weeks before the first rolling origin")->capture_default_str();
    sub->add_option("--folds", o->folds, "Cross-validation folds for the regressions")->capture_default_str();
    sub->add_option("--fourier", o->fourier, "Largest number of harmonics tried")->check(CLI::Range(1, 25))->capture_default_str();
    sub->add_option("--fill", o->fill, "Unknown future SI: persistence or si-forecast")
        ->check(CLI::IsMember({"persistence", "si-forecast"}))
        ->capture_default_str();
    sub->add_option("--seed", o->seed, "Seed for splits, folds and network initialisation")->capture_default_str();
    sub->callback([o, sub, io] {
        const auto weekly = load_weekly(o->weekly);
        const std::size_t n = weekly.size();
        if (o->min_train + static_cast<std::size_t>(o->horizon) > n) {
            throw std::invalid_argument("need min-train + horizon <= " + std::to_string(n) + " weeks");
        }
        const auto fill = parse_fill(o->fill);
        const std::filesystem::path dir(o->out);
        std::filesystem::create_directories(dir);

        Json report;
        report["weeks"] = n;
        report["horizon"] = o->horizon;
        report["min_train"] = o->min_train;
        Json xsummary;
        write_file_atomic(dir / "decomposition.csv", decomposition_csv(weekly));
        write_file_atomic(dir / "xcorr.csv", xcorr_csv(weekly, xsummary));
        report["xcorr"] = xsummary;

        // Full-series fits are reported; rolling origins refit on each prefix.
        const auto full = fit_time_series(weekly, n, *o);
        Json rows = Json::array();
        Json fits = Json::object();
        const std::vector<std::pair<std::string, const Json *>> ts{
            {"arima", &full.arima}, {"arimax", &full.arimax}, {"fourier", &full.fourier}};
        std::map<std::string, double> baselines, baselines_h;
        forecasters::ArimaxSetup ax;
        ax.grid = {};
        ax.si_grid = {};
        ax.fill = fill;
        const auto idx = indices::compute_indices(weekly);
        for (const auto &[name, model] : ts) {
            const Json &core = name == "fourier" ? model->at("regarima") : *model;
            const int k = core.at("n_params").get<int>();
            // ARIMA orders are re-selected at every origin; the Fourier structure is kept from the full fit.
            const auto r = name == "arima"    ? rolling_report(name, forecasters::univariate_arima({}), weekly,
                                                               o->horizon, o->min_train, k)
                           : name == "arimax" ? rolling_report(name, forecasters::arimax(idx, weekly, ax), weekly,
                                                               o->horizon, o->min_train, k)
                                              : evaluate_time_series(*model, weekly, o->horizon, o->min_train, fill);
            baselines = r.baseline_mapes;
            baselines_h = r.baseline_mapes_at_h;
            rows.push_back(comparison_row(r, name, "rolling-origin"));
            rows.back()["mape_by_step"] = r.mape_by_step;
            fits[name] = Json{{"label", core.at("label")}, {"aicc", core.at("aicc")}};
            if (name == "fourier") fits[name]["harmonics"] = model->at("harmonics");
        }
        for (const char *b : {"constant", "mean"}) {
            rows.insert(rows.begin() + (b[0] == 'c' ? 0 : 1),
                        Json{{"model", b},
                             {"protocol", "rolling-origin"},
                             {"horizon", o->horizon},
                             {"mape", baselines[b]},
                             {"mape_at_h", baselines_h[b]},
                             {"r2", nullptr},
                             {"adj_r2", nullptr}});
        }

        // Regressions on lagged designs with the random 80/20 split.
        SplitOptions split;
        split.seed = o->seed;
        const std::vector<std::tuple<std::string, std::string, Json>> regs{
            {"stepwise", "short", Json{{"criterion", "aic"}}},
            {"lasso", "lasso35", Json{{"mode", "lasso"}}},
            {"ensemble", "short", Json{{"tuning", "validation"}, {"seed", o->seed}}}};
        for (const auto &[kind, preset, options] : regs) {
            const auto model = fit_regression_pipeline(kind, options, weekly, tsa::LagSpec::preset(preset), split);
            const auto r = evaluate_regression(model, weekly, 0, o->min_train, o->folds, o->seed);
            rows.push_back(comparison_row(r, kind, "test-split"));
            double cv_mape = 0.0;
            std::size_t ok = 0;
            for (const auto &f : r.folds) {
                if (f.ok) {
                    cv_mape += f.mape;
                    ++ok;
                }
            }
            rows.back()["cv_mape"] = ok ? Json(cv_mape / static_cast<double>(ok)) : Json(nullptr);
            fits[kind] = Json{{"design", preset}, {"predictors", predictor_count(model)}};
        }
        report["comparison"] = rows;
        report["fits"] = fits;

        std::string csv = "model,protocol,horizon,mape,mape_at_h,r2,adj_r2\n";
        for (const auto &r : rows) {
            auto num = [](const Json &v) { return v.is_null() ? std::string() : format_double(v.get<double>()); };
            csv += r.at("model").get<std::string>() + ',' + r.at("protocol").get<std::string>() + ',' +
                   std::to_string(r.at("horizon").get<int>()) + ',' + num(r.at("mape")) + ',' +
                   num(r.at("mape_at_h")) + ',' + num(r.at("r2")) + ',' + num(r.at("adj_r2")) + '\n';
        }
        write_file_atomic(dir / "comparison.csv", csv);

        // Hold-out forecasts for the plots.
        const std::size_t t = n - static_cast<std::size_t>(o->horizon);
        const auto held = fit_time_series(weekly, t, *o);
        write_file_atomic(dir / "forecast_arima.csv",
                          holdout_csv(weekly, forecast_time_series(held.arima, nullptr, o->horizon, 95.0, fill), o->horizon));
        write_file_atomic(dir / "forecast_arimax.csv",
                          holdout_csv(weekly, forecast_time_series(held.arimax, &weekly, o->horizon, 95.0, fill),
                                      o->horizon));
        write_file_atomic(dir / "forecast_fourier.csv",
                          holdout_csv(weekly, forecast_time_series(held.fourier, &weekly, o->horizon, 95.0, fill),
                                      o->horizon));

        write_file_atomic(dir / "report.json", artifacts::dump(report));
        echo_config(dir, *sub);
        io.out << "wrote report for " << n << " weeks to " << dir.string() << '\n';
    });
}

} // namespace

void add_evaluation_commands(CLI::App &app, Io io) {
    add_forecast(app, io);
    add_evaluate(app, io);
    add_report(app, io);
}

} // namespace hdcast::cli
