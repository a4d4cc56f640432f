#include "hdcast/evaluation.hpp"
#include "hdcast/forecasters.hpp"
#include "hdcast/linear.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace hdcast;
using namespace hdcast::evaluation;

TEST_CASE("train/test split arithmetic") {
    const auto dm = testing::random_design(144, 2, 1);
    const auto split = split_train_test(dm, 0.8, SplitMode::random, 7);
    CHECK(split.train.rows() == 115);
    CHECK(split.test.rows() == 29);
    std::vector<std::size_t> all = split.train_rows;
    all.insert(all.end(), split.test_rows.begin(), split.test_rows.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
    CHECK(std::is_sorted(split.train_rows.begin(), split.train_rows.end()));

    const auto again = split_train_test(dm, 0.8, SplitMode::random, 7);
    CHECK(again.train_rows == split.train_rows);
    CHECK(split_train_test(dm, 0.8, SplitMode::random, 8).train_rows != split.train_rows);

    const auto ten = testing::random_design(10, 1, 2);
    const auto chrono = split_train_test(ten, 0.5, SplitMode::chronological);
    CHECK(chrono.train_rows == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(chrono.test_rows == std::vector<std::size_t>{5, 6, 7, 8, 9});

    CHECK_THROWS_AS(split_train_test(ten, 1.0, SplitMode::random), std::invalid_argument);
    CHECK_THROWS_AS(split_train_test(ten, 0.1, SplitMode::random), std::invalid_argument);
}

TEST_CASE("mape") {
    CHECK(mape(std::vector<double>{100, 200}, std::vector<double>{110, 180}) == doctest::Approx(10.0));
    const std::vector<double> a{1, 2, 3}, p{1.1, 1.7, 3.3};
    CHECK(mape(a, a) == 0.0);
    const std::vector<double> ca{7, 14, 21}, cp{7.7, 11.9, 23.1};
    CHECK(mape(ca, cp) == doctest::Approx(mape(a, p)).epsilon(1e-12));
    try {
        mape(std::vector<double>{1, 0, 2}, std::vector<double>{1, 1, 1});
        FAIL("expected DataError");
    } catch (const DataError &e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
    CHECK_THROWS_AS(mape(std::vector<double>{1, 2}, std::vector<double>{1}), std::invalid_argument);
}

TEST_CASE("fold sizes") {
    const auto sizes = fold_sizes(144, 10);
    CHECK(std::count(sizes.begin(), sizes.end(), 15) == 4);
    CHECK(std::count(sizes.begin(), sizes.end(), 14) == 6);
    CHECK(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) == 144);
    CHECK(fold_sizes(10, 10) == std::vector<std::size_t>(10, 1));
}

namespace {

Fitter ols_fitter() {
    return [](const DesignMatrix &train, const DesignMatrix &test) {
        const auto fit = linear::ols_fit(train);
        return linear::predict(fit, test);
    };
}

} // namespace

TEST_CASE("leave-one-out on noiseless data") {
    auto dm = testing::random_design(20, 2, 3, {0.3, -0.2}, 0.0);
    dm.target.array() += 2.0;
    const auto cv = kfold_cv(dm, 20, ols_fitter(), 1, TargetScale::identity);
    CHECK(cv.folds.size() == 20);
    CHECK(cv.failed == 0);
    CHECK(cv.mean_mape < 1e-8);
}

TEST_CASE("cross-validated R2 is optimistic-corrected") {
    int ok = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto dm = testing::random_design(60, 5, seed, {0.5, 0.3, 0, 0, 0.2});
        dm.target.array() += 10.0;
        const auto cv = kfold_cv(dm, 10, ols_fitter(), seed, TargetScale::identity);
        ok += cv.mean_r2 <= linear::ols_fit(dm).r2;
    }
    CHECK(ok >= 90);
}

TEST_CASE("fold failures are recorded") {
    const auto dm = testing::random_design(30, 1, 1);
    int calls = 0;
    const Fitter flaky = [&](const DesignMatrix &, const DesignMatrix &test) -> Eigen::VectorXd {
        if (++calls == 2) throw ModelError("boom");
        return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(test.rows()), 1.0);
    };
    const auto cv = kfold_cv(dm, 5, flaky, 1, TargetScale::identity);
    CHECK(cv.failed == 1);
    CHECK(cv.folds.size() == 5);
    CHECK(std::count_if(cv.folds.begin(), cv.folds.end(), [](const FoldResult &f) { return !f.ok; }) == 1);
}

TEST_CASE("baselines") {
    const auto b = baseline_forecasts(std::vector<double>{1, 2, 3}, 2);
    CHECK(b.constant == Series{3, 3});
    CHECK(b.mean == Series{2, 2});
    const auto fives = baseline_forecasts(Series(10, 5.0), 4);
    CHECK(fives.mean == Series(4, 5.0));
    Series ramp;
    for (int i = 1; i <= 30; ++i) ramp.push_back(i);
    CHECK(baseline_forecasts(ramp, 1).mean[0] == doctest::Approx(25.5));
}

TEST_CASE("rolling origin") {
    const Series flat(60, 4.0);
    const auto r = rolling_origin(flat, forecasters::mean_baseline(), 5, 30);
    CHECK(r.origins.size() == 60 - 5 - 30 + 1);
    CHECK(r.mape_mean == 0.0);
    CHECK(r.mape_at_h == 0.0);
    CHECK(r.mape_by_step.size() == 5);

    Series y;
    for (int i = 1; i <= 50; ++i) y.push_back(i);
    std::size_t max_seen = 0;
    const Forecaster spy = [&](std::span<const double> train, int h) {
        max_seen = std::max(max_seen, train.size());
        CHECK(train.back() == static_cast<double>(train.size())); // never past the origin
        return Series(static_cast<std::size_t>(h), train.back());
    };
    const auto rr = rolling_origin(y, spy, 3, 20);
    CHECK(max_seen == 47);
    // step-1 error at origin t is 1/(t+1)
    double expect = 0.0;
    for (std::size_t t = 20; t <= 47; ++t) expect += 100.0 / static_cast<double>(t + 1);
    CHECK(rr.mape_by_step[0] == doctest::Approx(expect / 28.0));
    CHECK_THROWS_AS(rolling_origin(y, spy, 10, 45), std::invalid_argument);
}

TEST_CASE("report scale") {
    Eigen::VectorXd v(2);
    v << 0.1, 0.3;
    CHECK(to_report_scale(v, TargetScale::sqrt)(1) == doctest::Approx(0.09));
    CHECK(to_report_scale(v, TargetScale::identity) == v);
}
