#include "hdcast/evaluation.hpp"
#include "hdcast/linear.hpp"
#include "hdcast/synth.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace hdcast;

TEST_CASE("noiseless line") {
    DesignMatrix dm;
    dm.columns = {"x"};
    dm.x.resize(10, 1);
    dm.target.resize(10);
    for (int i = 0; i < 10; ++i) {
        dm.x(i, 0) = i + 1;
        dm.target(i) = 2.0 * (i + 1);
    }
    const auto fit = linear::ols_fit(dm);
    CHECK(std::abs(fit.intercept) < 1e-10);
    CHECK(std::abs(fit.coefficient("x") - 2.0) < 1e-10);
    CHECK(fit.r2 == doctest::Approx(1.0));
}

TEST_CASE("constant target") {
    auto dm = testing::random_design(30, 3, 1);
    dm.target.setConstant(4.0);
    const auto fit = linear::ols_fit(dm);
    for (double b : fit.coefficients) CHECK(std::abs(b) < 1e-10);
    CHECK(fit.r2 == 0.0);
    CHECK(fit.intercept == doctest::Approx(4.0));
}

TEST_CASE("known coefficients are recovered") {
    const std::vector<double> beta{1.5, -2.0, 0.5, 0.0, 3.0};
    const auto dm = testing::random_design(50, 5, 7, beta, 0.01);
    const auto fit = linear::ols_fit(dm);
    for (std::size_t j = 0; j < beta.size(); ++j) CHECK(std::abs(fit.coefficients[j] - beta[j]) < 0.02);

    // residuals: zero sum, orthogonal to predictors, consistent with predict()
    CHECK(std::abs(fit.residuals.sum()) < 1e-9);
    for (Eigen::Index j = 0; j < dm.x.cols(); ++j) {
        CHECK(std::abs(dm.x.col(j).dot(fit.residuals)) < 1e-8 * dm.x.col(j).norm() * fit.residuals.norm());
    }
    const Eigen::VectorXd fitted = linear::predict(fit, dm);
    CHECK((dm.target - fitted - fit.residuals).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(fit.adj_r2 == doctest::Approx(1.0 - (1.0 - fit.r2) * 49.0 / 44.0));

    DesignMatrix zero = dm.head(1);
    zero.x.setZero();
    CHECK(linear::predict(fit, zero)(0) == doctest::Approx(fit.intercept));
    DesignMatrix missing = dm;
    missing.columns[0] = "other";
    CHECK_THROWS_AS(linear::predict(fit, missing), ModelError);
}

TEST_CASE("rank deficiency names the dependent columns") {
    auto dm = testing::random_design(40, 3, 2);
    dm.x.col(2) = 2.0 * dm.x.col(0);
    try {
        linear::ols_fit(dm);
        FAIL("expected ModelError");
    } catch (const ModelError &e) {
        const std::string what = e.what();
        CHECK((what.find("x2") != std::string::npos || what.find("x0") != std::string::npos));
    }
}

TEST_CASE("adding a predictor never lowers R^2") {
    const auto dm = testing::random_design(60, 6, 3, {1, 0.5, 0.2}, 1.0);
    double prev = 0.0;
    for (std::size_t k = 1; k <= 6; ++k) {
        std::vector<std::string> cols(dm.columns.begin(), dm.columns.begin() + static_cast<std::ptrdiff_t>(k));
        const double r2 = linear::ols_fit(dm, cols).r2;
        CHECK(r2 >= prev - 1e-12);
        prev = r2;
    }
}

TEST_CASE("stepwise finds a single strong signal") {
    std::vector<double> beta(10, 0.0);
    beta[3] = 3.0;
    const auto dm = testing::random_design(200, 10, 5, beta, 1.0);
    for (auto crit : {linear::StepCriterion::aic, linear::StepCriterion::pvalue}) {
        linear::StepwiseOptions o;
        o.criterion = crit;
        const auto fit = linear::forward_stepwise(dm, o);
        REQUIRE_FALSE(fit.selection_order.empty());
        CHECK(fit.selection_order.front() == "x3");
        if (crit == linear::StepCriterion::pvalue) CHECK(fit.names == std::vector<std::string>{"x3"});
    }
    CHECK(linear::forward_stepwise(dm).names == linear::forward_stepwise(dm).names);
}

TEST_CASE("stepwise false entries under pure noise") {
    linear::StepwiseOptions o;
    o.criterion = linear::StepCriterion::pvalue;
    o.alpha = 0.05;
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        total += static_cast<double>(linear::forward_stepwise(testing::random_design(200, 10, seed), o).p);
    }
    CHECK(total / 100.0 <= 1.0);
}

TEST_CASE("stepwise on the synthetic short-term design" * doctest::test_suite("calibration")) {
    int train_wins = 0;
    std::size_t si_selected = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        synth::SynthParams p;
        p.seed = seed;
        const auto w = synth::generate_weekly(p);
        const auto dm = tsa::build_design_matrix(indices::compute_indices(w.weekly), w.weekly,
                                                 tsa::LagSpec::short_term());
        const auto split = evaluation::split_train_test(dm, 0.8, evaluation::SplitMode::random, seed);
        const auto fit = linear::forward_stepwise(split.train);
        const double test_r2 = linear::r_squared(split.test.target, linear::predict(fit, split.test));
        train_wins += fit.r2 > test_r2;
        if (seed == 1) {
            for (const auto &n : fit.names) si_selected += n.starts_with("SI-");
        }
    }
    CHECK(train_wins >= 90);
    // a sparse subset of the ten SI lags
    CHECK(si_selected >= 1);
    CHECK(si_selected < 10);
}
