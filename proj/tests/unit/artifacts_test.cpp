#include "hdcast/artifacts.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace hdcast;
using artifacts::Json;

TEST_CASE("linear fit round trip") {
    const auto dm = testing::random_design(40, 3, 1, {1, 2, 3});
    const auto fit = linear::ols_fit(dm);
    const auto back = artifacts::linear_from_json(Json::parse(artifacts::dump(artifacts::to_json(fit))));
    CHECK(back.names == fit.names);
    CHECK(back.coefficients == fit.coefficients);
    CHECK(back.intercept == fit.intercept);
    CHECK(linear::predict(back, dm) == linear::predict(fit, dm));
}

TEST_CASE("ARIMA fit round trip keeps forecasts") {
    Rng rng(3);
    Series y;
    double level = 0.0;
    for (int t = 0; t < 120; ++t) y.push_back(level += rng.normal());
    const auto fit = arima::fit_regarima(y, arima::ArimaSpec::parse("1,1,1"));
    const auto j = artifacts::to_json(fit);
    CHECK(j.contains("spec"));
    CHECK(j.contains("aicc"));
    CHECK(j["spec"]["p"] == 1);
    const auto back = artifacts::regarima_from_json(Json::parse(artifacts::dump(j)));
    CHECK(back.spec == fit.spec);
    CHECK(arima::forecast(back, 5).point == arima::forecast(fit, 5).point);
    CHECK(artifacts::spec_from_json(artifacts::to_json(fit.spec)) == fit.spec);
}

TEST_CASE("tree and network round trips") {
    const auto dm = testing::random_design(60, 3, 2, {1, 0, -1});
    const auto tree = ensemble::fit_cart(dm);
    const auto tree_back = artifacts::cart_from_json(Json::parse(artifacts::dump(artifacts::to_json(tree))));
    CHECK(ensemble::predict(tree_back, dm) == ensemble::predict(tree, dm));

    ensemble::MlpOptions opt;
    opt.epochs = 50;
    const auto net = ensemble::fit_mlp(dm, opt);
    const auto net_back = artifacts::mlp_from_json(Json::parse(artifacts::dump(artifacts::to_json(net))));
    CHECK(ensemble::predict(net_back, dm) == ensemble::predict(net, dm));
}

TEST_CASE("ensemble artifact carries the weights") {
    const auto dm = testing::random_design(60, 3, 4, {1, 0, -1});
    ensemble::EnsembleOptions opt;
    opt.tuning = ensemble::WeightTuning::fixed;
    opt.mlp.epochs = 50;
    const auto fit = ensemble::fit_ensemble(dm, opt);
    const auto j = artifacts::to_json(fit.model);
    CHECK(j["weights"] == Json::array({0.15, 0.05, 0.8}));
    const auto back = artifacts::ensemble_from_json(Json::parse(artifacts::dump(j)));
    CHECK(ensemble::predict_ensemble(back, dm) == ensemble::predict_ensemble(fit.model, dm));
}

TEST_CASE("lasso path round trip") {
    const auto dm = testing::random_design(40, 4, 5, {1, 0, 0.5});
    const auto path = lasso::lar_path(dm);
    const auto back = artifacts::lar_path_from_json(Json::parse(artifacts::dump(artifacts::to_json(path))));
    CHECK(back.breakpoints.size() == path.breakpoints.size());
    const double lambda = 0.3 * path.lambda_max();
    CHECK(lasso::coefficients_at(back, lambda).values == lasso::coefficients_at(path, lambda).values);
}

TEST_CASE("synth parameters round trip") {
    synth::SynthParams p;
    p.seed = 42;
    p.conversion_lags = {{3, 0.5}, {4, 0.5}};
    const auto back = artifacts::synth_params_from_json(artifacts::to_json(p));
    CHECK(back.seed == 42);
    CHECK(back.conversion_lags == p.conversion_lags);
    CHECK(back.shock_sd == p.shock_sd);
}
