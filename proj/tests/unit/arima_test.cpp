#include "hdcast/arima.hpp"
#include "hdcast/forecasters.hpp"
#include "hdcast/harmonic.hpp"
#include "hdcast/synth.hpp"
#include "hdcast/tsa.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace hdcast;
using arima::ArimaSpec;

namespace {

Series white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    Rng rng(seed);
    Series out(n);
    for (double &v : out) v = sd * rng.normal();
    return out;
}

// ARIMA(1,1,0) with phi on the differences.
Series arima110(std::size_t n, double phi, std::uint64_t seed) {
    Rng rng(seed);
    return testing::cumsum(testing::ar1_path(n, phi, 1.0, rng));
}

// (0,1,3)(0,1,0)[52]: MA(3) differences, then seasonally integrated.
Series seasonal_ma3(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    const double theta[] = {0.4, -0.3, 0.5};
    Series e(n + 3), dx(n), y(n);
    for (double &v : e) v = rng.normal();
    for (std::size_t t = 0; t < n; ++t) dx[t] = e[t + 3] + theta[0] * e[t + 2] + theta[1] * e[t + 1] + theta[2] * e[t];
    Series w = testing::cumsum(dx);
    for (std::size_t t = 0; t < n; ++t) y[t] = w[t] + (t >= 52 ? y[t - 52] : std::sin(0.12 * static_cast<double>(t)));
    return y;
}

DesignMatrix single_column(const Series &x, const std::string &name = "x") {
    DesignMatrix dm;
    dm.columns = {name};
    dm.x = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    return dm;
}

} // namespace

TEST_CASE("spec parsing") {
    const auto s = ArimaSpec::parse("0,1,3:0,1,0:52");
    CHECK(s.to_string() == "ARIMA(0,1,3)(0,1,0)[52]");
    CHECK(ArimaSpec::parse("1,1,0").to_string() == "ARIMA(1,1,0)(0,0,0)[1]");
    CHECK_THROWS_AS(ArimaSpec::parse("1,x,0"), std::invalid_argument);
    CHECK_THROWS_AS(ArimaSpec::parse("1,1"), std::invalid_argument);
}

TEST_CASE("white noise with the degenerate spec") {
    const auto y = white_noise(200, 5);
    const auto fit = arima::fit_regarima(y, ArimaSpec{});
    CHECK(fit.beta.empty());
    CHECK(std::abs(fit.sigma2 - 1.0) < 0.15);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    const auto fc = arima::forecast(fit, 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(fc.point[i] == doctest::Approx(mean).epsilon(1e-6));
        CHECK(fc.upper[i] - fc.lower[i] == doctest::Approx(fc.upper[0] - fc.lower[0]).epsilon(1e-12));
    }
}

TEST_CASE("ARIMA(1,1,0) coefficient recovery") {
    int ok = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto fit = arima::fit_regarima(arima110(500, 0.6, seed), ArimaSpec::parse("1,1,0"));
        ok += fit.ar[0] >= 0.5 && fit.ar[0] <= 0.7;
    }
    CHECK(ok >= 18);
}

TEST_CASE("regression with ARMA(1,1) errors recovers beta") {
    Rng rng(101);
    const std::size_t n = 300;
    Series x(n), y(n);
    double u = 0.0, e_prev = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double e = rng.normal();
        u = 0.5 * u + e + 0.3 * e_prev;
        e_prev = e;
        x[t] = rng.normal();
        y[t] = 2.0 * x[t] + u;
    }
    const auto fit = arima::fit_regarima(y, single_column(x), ArimaSpec::parse("1,0,1"));
    CHECK(std::abs(fit.beta_of("x") - 2.0) < 0.1);
    CHECK(fit.ar[0] > 0.3);
    CHECK(fit.ma[0] > 0.1); // theta(B) = 1 + theta_1 B
}

TEST_CASE("beta matches least squares on differenced data when there is no ARMA part") {
    Rng rng(3);
    const std::size_t n = 120;
    Series x(n), y(n);
    double level = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = std::sin(0.3 * static_cast<double>(t)) + rng.normal();
        level += rng.normal();
        y[t] = 1.5 * x[t] + level;
    }
    const auto fit = arima::fit_regarima(y, single_column(x), ArimaSpec::parse("0,1,0"));
    const auto dx = tsa::difference(x, 1, 0, 1);
    const auto dy = tsa::difference(y, 1, 0, 1);
    const Eigen::Map<const Eigen::VectorXd> vx(dx.data(), static_cast<Eigen::Index>(dx.size()));
    const Eigen::Map<const Eigen::VectorXd> vy(dy.data(), static_cast<Eigen::Index>(dy.size()));
    CHECK(std::abs(fit.beta[0] - vx.dot(vy) / vx.squaredNorm()) < 1e-6);
}

TEST_CASE("AICc correction term") {
    const auto y = arima110(150, 0.4, 9);
    for (const char *text : {"1,1,0", "0,1,1", "2,1,1", "0,0,0"}) {
        const auto fit = arima::fit_regarima(y, ArimaSpec::parse(text));
        const double k = fit.n_params;
        const double n = static_cast<double>(fit.n_effective);
        CHECK(fit.aicc > fit.aic);
        CHECK(fit.aicc - fit.aic == doctest::Approx(2 * k * (k + 1) / (n - k - 1)).epsilon(1e-12));
        CHECK(fit.aic == doctest::Approx(-2 * fit.loglik + 2 * k).epsilon(1e-12));
    }
}

TEST_CASE("selection prefers the generating MA(3) spec") {
    const std::vector<ArimaSpec> grid = {ArimaSpec::parse("0,1,3:0,1,0:52"), ArimaSpec::parse("1,1,0:0,1,0:52")};
    int ok = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto sel = arima::auto_select(seasonal_ma3(260, seed), nullptr, grid);
        ok += sel.best.spec == grid[0];
        CHECK(sel.records.size() == 2);
    }
    CHECK(ok >= 15);
}

TEST_CASE("singleton grid and failure records") {
    const auto y = arima110(100, 0.5, 2);
    const auto sel = arima::auto_select(y, nullptr, {ArimaSpec::parse("1,1,0")});
    CHECK(sel.best.spec == ArimaSpec::parse("1,1,0"));
    // a seasonal spec longer than the data cannot be fitted
    const auto short_y = arima110(48, 0.5, 3);
    const auto mixed =
        arima::auto_select(short_y, nullptr, {ArimaSpec::parse("0,1,1:0,1,0:52"), ArimaSpec::parse("0,1,1")});
    CHECK(mixed.best.spec == ArimaSpec::parse("0,1,1"));
    REQUIRE(mixed.records.size() == 2);
    CHECK_FALSE(mixed.records[0].ok);
    CHECK_FALSE(mixed.best.warnings.empty());
    CHECK_THROWS(arima::auto_select(y, nullptr, {ArimaSpec::parse("0,1,1:0,2,0:52")}));
}

TEST_CASE("default grid on synthetic HDI is doubly differenced") {
    synth::SynthParams p;
    p.seed = 1;
    const auto w = synth::generate_weekly(p);
    const auto idx = indices::compute_indices(w.weekly);
    const auto grid = arima::default_grid(idx.hdi_sqrt(), nullptr);
    REQUIRE_FALSE(grid.empty());
    CHECK(grid.size() == 16);
    for (const auto &s : grid) {
        CHECK(s.d == 1);
        CHECK(s.D == 1);
        CHECK(s.s == 52);
    }
}

TEST_CASE("random walk gives a flat forecast with widening intervals") {
    const auto y = testing::cumsum(white_noise(150, 4));
    const auto fit = arima::fit_regarima(y, ArimaSpec::parse("0,1,0"));
    const auto fc = arima::forecast(fit, 10);
    double prev = 0.0;
    for (int i = 0; i < 10; ++i) {
        CHECK(fc.point[i] == doctest::Approx(y.back()).epsilon(1e-10));
        CHECK(fc.lower[i] <= fc.point[i]);
        CHECK(fc.point[i] <= fc.upper[i]);
        const double w = fc.upper[i] - fc.lower[i];
        CHECK(w > prev);
        prev = w;
        // sigma * sqrt(h) on a random walk
        CHECK(fc.model_se[i] == doctest::Approx(std::sqrt(fit.sigma2 * (i + 1))).epsilon(1e-9));
    }
}

TEST_CASE("psi weights") {
    const auto psi = arima::psi_weights(std::vector<double>{0.5}, std::vector<double>{}, 6);
    for (std::size_t j = 0; j < psi.size(); ++j) CHECK(psi[j] == doctest::Approx(std::pow(0.5, j)));
    const auto ma = arima::psi_weights(std::vector<double>{}, std::vector<double>{0.3, 0.2}, 5);
    CHECK(ma[0] == 1.0);
    CHECK(ma[1] == doctest::Approx(0.3));
    CHECK(ma[2] == doctest::Approx(0.2));
    CHECK(ma[3] == 0.0);

    const auto fit = arima::fit_regarima(arima110(200, 0.5, 6), ArimaSpec::parse("1,1,0"));
    const auto fc = arima::forecast(fit, 20);
    for (int i = 1; i < 20; ++i) CHECK(fc.model_se[i] > fc.model_se[i - 1]);
    const auto stat = arima::fit_regarima(white_noise(200, 8), ArimaSpec::parse("1,0,0"));
    const auto sfc = arima::forecast(stat, 20);
    for (int i = 1; i < 20; ++i) CHECK(sfc.model_se[i] >= sfc.model_se[i - 1] - 1e-12);
}

TEST_CASE("sqrt transform maps interval endpoints") {
    Series y;
    Rng rng(12);
    for (int t = 0; t < 120; ++t) y.push_back(std::pow(2.0 + 0.2 * rng.normal(), 2));
    arima::FitOptions opt;
    opt.transform = arima::Transform::sqrt;
    Series root;
    for (double v : y) root.push_back(std::sqrt(v));
    const auto fit = arima::fit_regarima(root, ArimaSpec{}, opt);
    const auto fc = arima::forecast(fit, 3, nullptr, 80.0);
    CHECK(fc.level == 80.0);
    for (int i = 0; i < 3; ++i) {
        CHECK(fc.point[i] == doctest::Approx(fc.model_point[i] * fc.model_point[i]));
        const double z = arima::normal_quantile(0.9);
        CHECK(fc.upper[i] == doctest::Approx(std::pow(fc.model_point[i] + z * fc.model_se[i], 2)));
    }
    CHECK(arima::normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-9));
}

TEST_CASE("refits are bit-reproducible") {
    const auto y = seasonal_ma3(200, 3);
    const auto a = arima::fit_regarima(y, ArimaSpec::parse("1,1,1:0,1,0:52"));
    const auto b = arima::fit_regarima(y, ArimaSpec::parse("1,1,1:0,1,0:52"));
    CHECK(a.loglik == b.loglik);
    CHECK(a.ar == b.ar);
    CHECK(a.ma == b.ma);
}

TEST_CASE("future regressors: known versus filled cells") {
    synth::SynthParams p;
    p.seed = 2;
    const auto w = synth::generate_weekly(p);
    const auto idx = indices::compute_indices(w.weekly);
    const auto si = idx.si();
    const std::size_t n = si.size();

    tsa::LagSpec l20;
    l20.si_lags = {20};
    const auto known = arima::lagged_xreg_future(idx, l20, 5);
    CHECK(known.matrix.rows() == 5);
    for (int i = 1; i <= 5; ++i) {
        CHECK_FALSE(known.filled[i - 1][0]);
        CHECK(known.matrix.x(i - 1, 0) == si[n + i - 20 - 1]);
    }

    tsa::LagSpec l5;
    l5.si_lags = {5};
    const auto mixed = arima::lagged_xreg_future(idx, l5, 20);
    for (int i = 1; i <= 20; ++i) {
        CHECK(mixed.filled[i - 1][0] == (i > 5));
        CHECK(mixed.matrix.x(i - 1, 0) == (i > 5 ? si.back() : si[n + i - 5 - 1]));
    }
    CHECK(mixed.step_labels()[0].empty());
    CHECK(mixed.step_labels()[5] == "SI-L5");

    Series path(20, 0.5);
    const auto plugged = arima::lagged_xreg_future(idx, l5, 20, &path);
    CHECK(plugged.matrix.x(6, 0) == 0.5);

    const auto block = arima::lagged_xreg_future(idx, tsa::LagSpec::arimax(), 20);
    CHECK(block.matrix.rows() == 20);
    CHECK(block.matrix.columns == tsa::LagSpec::arimax().column_names());
}

TEST_CASE("regression forecast needs future regressors") {
    const auto x = white_noise(80, 1);
    Series y;
    for (double v : x) y.push_back(3 * v + 1);
    const auto fit = arima::fit_regarima(y, single_column(x), ArimaSpec{});
    CHECK_THROWS(arima::forecast(fit, 3));
}

TEST_CASE("stationary harmonic errors give bounded interval growth") {
    Rng rng(17);
    Series y;
    double u = 0.0;
    for (int t = 1; t <= 156; ++t) {
        u = 0.6 * u + 0.05 * rng.normal();
        y.push_back(1.0 + 0.002 * t + 0.2 * std::cos(2 * std::numbers::pi * (t - 34) / 52.18) + u);
    }
    arima::HarmonicOptions opt;
    opt.max_harmonics = 4;
    const auto fit = arima::fit_harmonic(y, nullptr, opt);
    CHECK(fit.harmonics >= 1);
    CHECK(fit.model.spec.d == 0);
    CHECK(fit.model.spec.D == 0);
    const auto fc = arima::forecast_harmonic(fit, 20);
    const double w10 = fc.upper[9] - fc.lower[9];
    const double w20 = fc.upper[19] - fc.lower[19];
    CHECK(w20 <= 1.05 * w10);
    // seasonal signal carries through the forecast
    CHECK(std::abs(fc.point[0] - y.back()) < 0.3);
}
