#include "commands.hpp"
#include "models.hpp"

#include "hdcast/forecasters.hpp"
#include "hdcast/harmonic.hpp"
#include "hdcast/lasso.hpp"

#include <cmath>
#include <memory>
#include <ostream>

namespace hdcast::cli {

namespace {

struct RegressionOpts {
    std::string weekly, out;
    LagOptions lags;
    SplitOptions split;
};

void add_regression_inputs(CLI::App *sub, RegressionOpts &o, std::string preset) {
    sub->add_option("--weekly", o.weekly, "Weekly CSV")->required();
    o.lags.add_to(sub, std::move(preset));
    o.split.add_to(sub);
    sub->add_option("--out", o.out, "Model JSON (stdout if omitted)");
}

Json fit_with_pipeline(const std::string &kind, const Json &options, const RegressionOpts &o) {
    return fit_regression_pipeline(kind, options, load_weekly(o.weekly), o.lags.spec(), o.split);
}

void add_fit_linear(CLI::App &app, Io io) {
    struct Opts : RegressionOpts {
        std::string criterion = "aic";
        double alpha = 0.05;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("fit-linear", "Forward stepwise linear regression of sqrt(HDI) on lagged predictors");
    add_regression_inputs(sub, *o, "short");
    sub->add_option("--criterion", o->criterion, "Entry rule: aic or pvalue")
        ->check(CLI::IsMember({"aic", "pvalue"}))
        ->capture_default_str();
    sub->add_option("--alpha", o->alpha, "Entry p-value threshold")->check(CLI::Range(1e-6, 0.5))->capture_default_str();
    sub->callback([o, sub, io] {
        const Json options{{"criterion", o->criterion}, {"alpha", o->alpha}};
        emit(o->out, artifacts::dump(fit_with_pipeline("stepwise", options, *o)), *sub, io);
    });
}

void add_fit_lasso(CLI::App &app, Io io) {
    struct Opts : RegressionOpts {
        std::string mode = "lasso", path_out;
        double lambda = 0.0, fraction = 0.0;
        std::size_t min_train = 0, grid_size = 40;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("fit-lasso", "Lasso or LAR path; the penalty is chosen by rolling one-step MAPE");
    add_regression_inputs(sub, *o, "lasso35");
    sub->add_option("--mode", o->mode, "lasso or lar")->check(CLI::IsMember({"lasso", "lar"}))->capture_default_str();
    auto *lambda = sub->add_option("--lambda", o->lambda, "Fixed penalty on the standardised scale")
                       ->check(CLI::NonNegativeNumber);
    auto *fraction = sub->add_option("--lambda-fraction", o->fraction, "Fixed penalty as a share of lambda_max")
                         ->check(CLI::Range(0.0, 1.0))
                         ->excludes(lambda);
    sub->add_option("--min-train", o->min_train, "First rolling origin for penalty selection (0 = half the rows)");
    sub->add_option("--grid-size", o->grid_size, "Penalty grid points")->check(CLI::Range(2, 1000))->capture_default_str();
    sub->add_option("--path-out", o->path_out, "Also write the coefficient path CSV here");
    sub->callback([o, sub, io, lambda, fraction] {
        Json options{{"mode", o->mode}, {"grid_size", o->grid_size}};
        if (lambda->count() > 0) options["lambda"] = o->lambda;
        if (fraction->count() > 0) options["lambda_fraction"] = o->fraction;
        if (o->min_train > 0) options["min_train"] = o->min_train;
        const Json model = fit_with_pipeline("lasso", options, *o);
        if (!o->path_out.empty()) {
            write_file_atomic(o->path_out, lasso::format_path_csv(artifacts::lar_path_from_json(model.at("path"))));
        }
        emit(o->out, artifacts::dump(model), *sub, io);
    });
}

void add_fit_ensemble(CLI::App &app, Io io) {
    struct Opts : RegressionOpts {
        std::string tuning = "validation";
        int hidden = 8, epochs = 2000, cart_depth = 6;
        std::size_t cart_min_leaf = 5;
        double learn_rate = 0.01, grid_step = 0.05;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("fit-ensemble", "Weighted linear + CART + neural network ensemble");
    add_regression_inputs(sub, *o, "short");
    sub->add_option("--tuning", o->tuning, "Weights: fixed, validation or test")
        ->check(CLI::IsMember({"fixed", "validation", "test"}))
        ->capture_default_str();
    sub->add_option("--hidden", o->hidden, "Hidden units")->check(CLI::Range(1, 1024))->capture_default_str();
    sub->add_option("--epochs", o->epochs, "Training epochs")->check(CLI::Range(1, 10000000))->capture_default_str();
    sub->add_option("--learn-rate", o->learn_rate, "Gradient step")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--cart-depth", o->cart_depth, "Tree depth (0 = unlimited)")->capture_default_str();
    sub->add_option("--cart-min-leaf", o->cart_min_leaf, "Rows per leaf")->check(CLI::Range(1, 100000))->capture_default_str();
    sub->add_option("--grid-step", o->grid_step, "Weight lattice spacing")->check(CLI::Range(0.001, 0.5))->capture_default_str();
    sub->callback([o, sub, io] {
        if (o->tuning == "test" && o->split.mode == "none") {
            throw std::invalid_argument("--tuning test needs a train/test split");
        }
        const Json options{{"tuning", o->tuning},         {"hidden", o->hidden},
                           {"epochs", o->epochs},         {"learn_rate", o->learn_rate},
                           {"cart_depth", o->cart_depth}, {"cart_min_leaf", o->cart_min_leaf},
                           {"grid_step", o->grid_step},   {"seed", o->split.seed}};
        emit(o->out, artifacts::dump(fit_with_pipeline("ensemble", options, *o)), *sub, io);
    });
}

void add_fit_arima(CLI::App &app, Io io) {
    struct Opts {
        std::string weekly, out, spec, xreg = "none", transform = "sqrt", grid = "default";
        int max_p = 3, max_q = 3, fourier = 0;
        std::size_t train_weeks = 0;
        std::uint64_t seed = arima::FitOptions{}.seed;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("fit-arima", "Seasonal ARIMA, regression with ARIMA errors, or Fourier regression");
    sub->add_option("--weekly", o->weekly, "Weekly CSV")->required();
    auto *spec = sub->add_option("--spec", o->spec, "Fixed orders p,d,q or p,d,q:P,D,Q:s (default: AICc search)");
    sub->add_option("--xreg", o->xreg, "Lagged SI regressors: none, arimax (5-20) or a lag list such as 5-20")
        ->capture_default_str();
    sub->add_option("--transform", o->transform, "Scale of the fitted series: sqrt or none")
        ->check(CLI::IsMember({"sqrt", "none"}))
        ->capture_default_str();
    sub->add_option("--grid", o->grid, "Search space: default (tests pick d and D) or seasonal ((p,1,q)(0,1,0)[52])")
        ->check(CLI::IsMember({"default", "seasonal"}))
        ->capture_default_str()
        ->excludes(spec);
    sub->add_option("--max-p", o->max_p, "Largest AR order searched")->check(CLI::Range(0, 5))->capture_default_str();
    sub->add_option("--max-q", o->max_q, "Largest MA order searched")->check(CLI::Range(0, 5))->capture_default_str();
    sub->add_option("--fourier", o->fourier, "Fourier regression with up to K harmonics and ARMA errors (0 = off)")
        ->check(CLI::Range(0, 25))
        ->capture_default_str()
        ->excludes(spec);
    sub->add_option("--train-weeks", o->train_weeks, "Fit on the first N weeks only (0 = all)");
    sub->add_option("--seed", o->seed, "Seed for restarts at the stationarity boundary")->capture_default_str();
    sub->add_option("--out", o->out, "Model JSON (stdout if omitted)");
    sub->callback([o, sub, io] {
        auto weekly = load_weekly(o->weekly);
        if (o->train_weeks > 0) {
            if (o->train_weeks > weekly.size()) throw std::invalid_argument("--train-weeks exceeds the series length");
            weekly = weekly.head(o->train_weeks);
        }
        const auto idx = indices::compute_indices(weekly);
        tsa::LagSpec lags;
        if (o->xreg == "arimax") {
            lags = tsa::LagSpec::arimax();
        } else if (o->xreg != "none") {
            lags.si_lags = tsa::parse_lag_list(o->xreg);
        }
        arima::FitOptions fit;
        fit.seed = o->seed;
        fit.transform = o->transform == "sqrt" ? arima::Transform::sqrt : arima::Transform::none;

        Series y;
        std::optional<DesignMatrix> xreg;
        std::size_t first_t = 1;
        if (lags.empty()) {
            y = o->transform == "sqrt" ? idx.hdi_sqrt() : idx.hdi();
        } else {
            auto data = forecasters::arimax_data(idx, weekly, lags, idx.size());
            y = data.y;
            if (fit.transform == arima::Transform::none) {
                for (double &v : y) v *= v;
            }
            xreg = std::move(data.xreg);
            first_t = static_cast<std::size_t>(lags.max_lag()) + 1;
        }
        const DesignMatrix *x = xreg ? &*xreg : nullptr;

        Json model;
        Json selection = Json::array();
        if (o->fourier > 0) {
            arima::HarmonicOptions ho;
            ho.max_harmonics = o->fourier;
            ho.max_p = std::min(o->max_p, 2);
            ho.max_q = std::min(o->max_q, 2);
            ho.fit = fit;
            model = artifacts::to_json(arima::fit_harmonic(y, x, ho, first_t));
        } else if (!o->spec.empty()) {
            const auto s = arima::ArimaSpec::parse(o->spec);
            model = artifacts::to_json(x ? arima::fit_regarima(y, *x, s, fit) : arima::fit_regarima(y, s, fit));
        } else {
            arima::GridOptions go;
            go.max_p = o->max_p;
            go.max_q = o->max_q;
            const auto grid = o->grid == "seasonal" ? forecasters::seasonal_family(o->max_p, o->max_q)
                                                    : arima::default_grid(y, x, go);
            const auto sel = arima::auto_select(y, x, grid, fit);
            model = artifacts::to_json(sel.best);
            for (const auto &r : sel.records) {
                Json rj{{"spec", r.spec.to_string()}, {"ok", r.ok}};
                if (r.ok) {
                    rj["aicc"] = r.aicc;
                } else {
                    rj["error"] = r.message;
                }
                selection.push_back(rj);
            }
        }
        const auto &first = weekly.records.front();
        model["pipeline"] = Json{{"target", "hdi"},
                                 {"transform", o->transform},
                                 {"xreg", lags.empty() ? Json(nullptr) : lag_json(lags)},
                                 {"train_weeks", weekly.size()},
                                 {"first_week", std::to_string(first.year) + "-" + std::to_string(first.week)},
                                 {"selection", selection}};
        emit(o->out, artifacts::dump(model), *sub, io);
    });
}

} // namespace

void add_model_commands(CLI::App &app, Io io) {
    add_fit_linear(app, io);
    add_fit_lasso(app, io);
    add_fit_arima(app, io);
    add_fit_ensemble(app, io);
}

} // namespace hdcast::cli
