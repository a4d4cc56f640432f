// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include "cli.hpp"
#include "hdcast/ensemble.hpp"
#include "hdcast/evaluation.hpp"
#include "hdcast/forecasters.hpp"
#include "hdcast/indices.hpp"
#include "hdcast/lasso.hpp"
#include "hdcast/rng.hpp"
#include "hdcast/synth.hpp"
#include "hdcast/tsa.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace hdcast;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool pass, const std::string &detail) {
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !pass;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

DesignMatrix random_problem(std::size_t n, std::size_t p, std::uint64_t seed) {
    Rng rng(seed);
    DesignMatrix dm;
    dm.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    dm.target.resize(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < p; ++j) dm.columns.push_back("x" + std::to_string(j));
    Eigen::VectorXd beta(static_cast<Eigen::Index>(p));
    for (auto &b : beta) b = rng.uniform() < 0.5 ? 0.0 : rng.normal(0.0, 2.0);
    for (Eigen::Index i = 0; i < dm.x.rows(); ++i) {
        for (Eigen::Index j = 0; j < dm.x.cols(); ++j) dm.x(i, j) = rng.normal();
        dm.target(i) = dm.x.row(i).dot(beta) + rng.normal();
    }
    return dm;
}

void lasso_oracle() {
    const auto t0 = Clock::now();
    double worst_coef = 0.0, worst_kkt = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto dm = random_problem(50, 10, seed);
        const auto path = lasso::lar_path(dm);
        const auto st = lasso::standardize(dm);
        for (const auto &bp : path.breakpoints) {
            const Eigen::VectorXd grad = st.z.transpose() * (st.y - st.z * bp.beta);
            for (Eigen::Index j = 0; j < grad.size(); ++j) {
                const double v = bp.beta(j) != 0.0 ? std::abs(grad(j) - bp.lambda * (bp.beta(j) > 0 ? 1.0 : -1.0))
                                                   : std::max(0.0, std::abs(grad(j)) - bp.lambda);
                worst_kkt = std::max(worst_kkt, v);
            }
        }
        for (int k = 0; k < 20; ++k) {
            const double lambda = path.lambda_max() * (0.98 - 0.97 * k / 19.0);
            const auto lar = lasso::coefficients_at(path, lambda);
            const auto cd = lasso::cd_lasso(dm, lambda);
            worst_coef = std::max(worst_coef, (lar.standardized - cd.standardized).cwiseAbs().maxCoeff());
        }
    }
    const double secs = seconds_since(t0);
    report(1, worst_coef <= 1e-6 && worst_kkt <= 1e-8 && secs < 10.0,
           fmt("max |lar - cd| = %.2e, max KKT violation = %.2e, %.2fs", worst_coef, worst_kkt, secs));
}

void arima_recovery() {
    const auto t0 = Clock::now();
    int ar_ok = 0, beta_ok = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        Series y;
        double dx = 0.0, level = 0.0;
        for (int t = 0; t < 600; ++t) {
            dx = 0.6 * dx + rng.normal();
            level += dx;
            if (t >= 100) y.push_back(level);
        }
        const auto fit = arima::fit_regarima(y, arima::ArimaSpec::parse("1,1,0"));
        ar_ok += fit.ar[0] >= 0.5 && fit.ar[0] <= 0.7;

        Rng r2(seed + 1000);
        Series z;
        DesignMatrix x;
        x.columns = {"x"};
        x.x.resize(300, 1);
        double u = 0.0, e_prev = 0.0;
        for (int t = 0; t < 300; ++t) {
            const double e = r2.normal();
            u = 0.5 * u + e + 0.3 * e_prev;
            e_prev = e;
            x.x(t, 0) = r2.normal();
            z.push_back(2.0 * x.x(t, 0) + u);
        }
        const auto reg = arima::fit_regarima(z, x, arima::ArimaSpec::parse("1,0,1"));
        beta_ok += std::abs(reg.beta[0] - 2.0) <= 0.1;
    }
    const double secs = seconds_since(t0);
    report(2, ar_ok >= 18 && beta_ok >= 18 && secs < 60.0,
           fmt("alpha1 in [0.5,0.7]: %d/20, beta within 0.1 of 2: %d/20, %.1fs", ar_ok, beta_ok, secs));
}

void paper_ordering() {
    const auto t0 = Clock::now();
    int ok = 0, pairs[3] = {};
    std::string detail;
    forecasters::ArimaxSetup setup;
    setup.grid = {};
    setup.si_grid = {};
    setup.fill = arima::FillMode::si_forecast;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        synth::SynthParams p;
        p.seed = seed;
        const auto w = synth::generate_weekly(p);
        const auto idx = indices::compute_indices(w.weekly);
        const auto hdi = idx.hdi();
        const evaluation::Forecaster models[] = {forecasters::arimax(idx, w.weekly, setup), forecasters::univariate_arima({}),
                                                 forecasters::mean_baseline(), forecasters::constant_baseline()};
        double m[4];
        for (int k = 0; k < 4; ++k) m[k] = evaluation::rolling_origin(hdi, models[k], 20, 104).mape_mean;
        const bool order = m[0] < m[1] && m[1] <= m[2] && m[2] < m[3];
        ok += order;
        pairs[0] += m[0] < m[1];
        pairs[1] += m[1] <= m[2];
        pairs[2] += m[2] < m[3];
        detail += fmt("\n    seed %2d  arimax %.1f  arima %.1f  mean %.1f  constant %.1f %s", static_cast<int>(seed), m[0], m[1],
                      m[2], m[3], order ? "" : "(out of order)");
    }
    const double secs = seconds_since(t0);
    report(3, ok >= 8 && secs < 300.0, fmt("ordering holds in %d/10 seeds (arimax<arima %d, arima<=mean %d, mean<constant %d), %.0fs", ok,
               pairs[0], pairs[1], pairs[2], secs) + detail);
}

void interval_shape() {
    synth::SynthParams p;
    p.seed = 1;
    const auto w = synth::generate_weekly(p);
    const auto idx = indices::compute_indices(w.weekly);
    arima::HarmonicOptions opt;
    opt.max_harmonics = 6;
    const auto hfit = arima::fit_harmonic(idx.hdi_sqrt(), nullptr, opt);
    const auto hfc = arima::forecast_harmonic(hfit, 20);
    const double w10 = hfc.model_se[9], w20 = hfc.model_se[19];

    const auto sel = arima::auto_select(idx.hdi_sqrt(), nullptr, arima::default_grid(idx.hdi_sqrt(), nullptr));
    const auto ufc = arima::forecast(sel.best, 20);
    bool increasing = sel.best.spec.diff_order() > 0;
    for (int i = 1; i < 20; ++i) increasing = increasing && ufc.model_se[i] > ufc.model_se[i - 1];
    report(4, w20 <= 1.05 * w10 && increasing,
           fmt("Fourier K=%d %s: width(20)/width(10) = %.4f; %s widths strictly increasing: %s", hfit.harmonics,
               hfit.model.spec.to_string().c_str(), w20 / w10, sel.best.spec.to_string().c_str(),
               increasing ? "yes" : "no"));
}

void table_one() {
    ingest::WeeklySeries ws;
    const long rows[4][3] = {{11672, 58, 15850}, {13250, 82, 16153}, {13732, 87, 16410}, {12978, 153, 16637}};
    for (int i = 0; i < 4; ++i) {
        ingest::WeeklyRecord r;
        r.year = 2014;
        r.week = 10 + i;
        r.showings = rows[i][0];
        r.sold = rows[i][1];
        r.on_market = rows[i][2];
        ws.records.push_back(r);
    }
    const auto idx = indices::compute_indices(ws);
    bool ok = idx.rows.size() == 4;
    std::string detail;
    for (int i = 0; i < 4 && ok; ++i) {
        const double hdi = static_cast<double>(rows[i][1]) / static_cast<double>(rows[i][2]);
        const double si = static_cast<double>(rows[i][0]) / static_cast<double>(rows[i][2]);
        const auto same = [](double a, double b) { return fmt("%.9e", a) == fmt("%.9e", b); };
        ok = ok && same(idx.rows[i].hdi, hdi) && same(idx.rows[i].si, si);
        detail += fmt(" (%.9e, %.9e)", idx.rows[i].hdi, idx.rows[i].si);
    }
    report(5, ok, "HDI/SI to 10 significant digits:" + detail);
}

void split_arithmetic() {
    DesignMatrix dm;
    dm.columns = {"x"};
    dm.x = Eigen::VectorXd::LinSpaced(144, 1, 144);
    dm.target = dm.x.col(0);
    const auto s = evaluation::split_train_test(dm, 0.8, evaluation::SplitMode::random, 1);
    report(6, s.train.rows() == 115 && s.test.rows() == 29,
           fmt("train %zu / test %zu", s.train.rows(), s.test.rows()));
}

void ccf_peak() {
    int hits = 0, significant = 0;
    std::string lags;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        synth::SynthParams p;
        p.seed = seed;
        const auto w = synth::generate_weekly(p);
        const auto ccf = tsa::cross_correlation(w.weekly.showings(), w.weekly.sold(), 25);
        const double bound = tsa::ccf_significance_bound(w.weekly.size());
        int best = 0;
        double best_r = -2.0;
        bool all_sig = true;
        for (const auto &c : ccf) {
            if (c.correlation > best_r) {
                best_r = c.correlation;
                best = c.lag;
            }
            if (c.lag >= 5 && c.lag <= 20) all_sig = all_sig && std::abs(c.correlation) > bound;
        }
        hits += best >= 9 && best <= 11;
        significant += all_sig;
        lags += " " + std::to_string(best);
    }
    report(7, hits >= 18 && significant >= 18,
           fmt("argmax in [9,11]: %d/20, significant at lags 5..20: %d/20; argmax lags:", hits, significant) + lags);
}

void gradient_check() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed * 7);
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(seed % 3), hidden = 3 + static_cast<Eigen::Index>(seed), n = 15;
        Eigen::MatrixXd z(n, p);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) z(i, j) = rng.normal();
            y(i) = rng.normal();
        }
        const auto w = ensemble::init_weights(p, hidden, seed);
        const Eigen::VectorXd grad = ensemble::mlp_gradient(w, z, y);
        const Eigen::VectorXd flat = w.flatten();
        for (Eigen::Index k = 0; k < flat.size(); ++k) {
            const double h = 1e-6 * std::max(1.0, std::abs(flat(k)));
            Eigen::VectorXd up = flat, down = flat;
            up(k) += h;
            down(k) -= h;
            const double fd = (ensemble::mlp_loss(ensemble::MlpWeights::unflatten(up, p, hidden), z, y) -
                               ensemble::mlp_loss(ensemble::MlpWeights::unflatten(down, p, hidden), z, y)) /
                              (2 * h);
            worst = std::max(worst, std::abs(fd - grad(k)) / std::max(1.0, std::abs(grad(k))));
        }
    }
    report(8, worst <= 1e-5, fmt("max relative gradient error %.2e over 5 networks", worst));
}

void ensemble_contract() {
    const auto &w = ensemble::kDefaultWeights;
    const bool defaults = w[0] == 0.15 && w[1] == 0.05 && w[2] == 0.80 && std::abs(w[0] + w[1] + w[2] - 1.0) <= 1e-12;
    auto train = random_problem(150, 4, 99);
    ensemble::EnsembleOptions opt;
    opt.tuning = ensemble::WeightTuning::fixed;
    opt.mlp.epochs = 500;
    const auto fit = ensemble::fit_ensemble(train, opt);
    const auto rows = random_problem(1000, 4, 100);
    const auto parts = ensemble::predict_parts(fit.model, rows);
    const auto pred = ensemble::predict_ensemble(fit.model, rows);
    int outside = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        const double lo = std::min({parts.linear(i), parts.cart(i), parts.mlp(i)});
        const double hi = std::max({parts.linear(i), parts.cart(i), parts.mlp(i)});
        outside += pred(i) < lo - 1e-12 || pred(i) > hi + 1e-12;
    }
    report(9, defaults && outside == 0 && fit.model.weights == w,
           fmt("weights (%.2f, %.2f, %.2f), rows outside sub-model range: %d/1000", w[0], w[1], w[2], outside));
}

std::map<std::string, std::string> snapshot(const fs::path &dir) {
    std::map<std::string, std::string> out;
    for (const auto &e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        out[fs::relative(e.path(), dir).string()] = s.str();
    }
    return out;
}

void determinism() {
    const auto dir = fs::temp_directory_path() / "hdcast_acceptance_determinism";
    const auto d = [&](const char *name) { return (dir / name).string(); };
    const std::vector<std::vector<std::string>> steps = {
        {"synth", "--out", d("corpus"), "--seed", "11"},
        {"aggregate", "--events", d("corpus/events.csv"), "--out", d("weekly.csv")},
        {"indices", "--weekly", d("weekly.csv"), "--out", d("indices.csv")},
        {"fit-arima", "--weekly", d("weekly.csv"), "--xreg", "arimax", "--grid", "seasonal", "--max-p", "2", "--max-q", "2",
         "--out", d("model.json")},
        {"forecast", "--model", d("model.json"), "--weekly", d("weekly.csv"), "--horizon", "20", "--out", d("forecast.csv")},
        {"evaluate", "--model", d("model.json"), "--weekly", d("weekly.csv"), "--min-train", "120", "--out", d("report.json")},
    };
    std::map<std::string, std::string> runs[2];
    std::string failed;
    for (auto &run : runs) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        for (const auto &args : steps) {
            std::ostringstream out, err;
            if (cli::run(args, out, err) != cli::kExitOk) failed = args[0] + ": " + err.str();
        }
        run = snapshot(dir);
    }
    fs::remove_all(dir);
    std::string differing;
    for (const auto &[name, bytes] : runs[0]) {
        const auto it = runs[1].find(name);
        if (it == runs[1].end() || it->second != bytes) differing += " " + name;
    }
    report(10, failed.empty() && differing.empty() && runs[0].size() == runs[1].size() && runs[0].size() >= 6,
           failed.empty() ? fmt("%zu output files compared, differing:%s", runs[0].size(), differing.empty() ? " none" : differing.c_str())
                          : "step failed: " + failed);
}

} // namespace

int main(int argc, char **argv) {
    // optional: run a subset, e.g. `acceptance 3 7`
    std::vector<std::function<void()>> all = {lasso_oracle, arima_recovery, paper_ordering, interval_shape, table_one,
                                              split_arithmetic, ccf_peak, gradient_check, ensemble_contract, determinism};
    std::vector<int> pick;
    for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));
    if (pick.empty())
        for (int i = 1; i <= 10; ++i) pick.push_back(i);
    for (int id : pick) {
        if (id < 1 || id > 10) continue;
        try {
            all[static_cast<std::size_t>(id - 1)]();
        } catch (const std::exception &e) {
            report(id, false, std::string("threw: ") + e.what());
        }
    }
    return failures == 0 ? 0 : 1;
}
