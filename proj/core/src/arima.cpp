#include "hdcast/arima.hpp"

#include "hdcast/optim.hpp"
#include "hdcast/parallel.hpp"
#include "hdcast/rng.hpp"
#include "hdcast/tsa.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace hdcast::arima {

namespace {

constexpr double kBoundary = 0.9999;

int parse_int(std::string_view text, std::string_view what) {
    int v = 0;
    const auto *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || v < 0) {
        throw std::invalid_argument("ARIMA spec: bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == sep) {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

} // namespace

ArimaSpec ArimaSpec::parse(std::string_view text) {
    const auto groups = split(text, ':');
    if (groups.size() != 1 && groups.size() != 3) {
        throw std::invalid_argument("ARIMA spec must be 'p,d,q' or 'p,d,q:P,D,Q:s', got '" + std::string(text) + "'");
    }
    auto triple = [&](std::string_view g, std::string_view what) {
        const auto parts = split(g, ',');
        if (parts.size() != 3) throw std::invalid_argument("ARIMA spec: " + std::string(what) + " needs three orders");
        return std::array<int, 3>{parse_int(parts[0], what), parse_int(parts[1], what), parse_int(parts[2], what)};
    };
    ArimaSpec s;
    const auto ns = triple(groups[0], "non-seasonal order");
    s.p = ns[0];
    s.d = ns[1];
    s.q = ns[2];
    if (groups.size() == 3) {
        const auto se = triple(groups[1], "seasonal order");
        s.P = se[0];
        s.D = se[1];
        s.Q = se[2];
        s.s = parse_int(groups[2], "season length");
    }
    s.validate();
    return s;
}

std::string ArimaSpec::to_string() const {
    auto t = [](int a, int b, int c) {
        return "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")";
    };
    return "ARIMA" + t(p, d, q) + t(P, D, Q) + "[" + std::to_string(s) + "]";
}

void ArimaSpec::validate() const {
    if (s < 1) throw std::invalid_argument("ARIMA spec: season length must be >= 1");
    if (p < 0 || d < 0 || q < 0 || P < 0 || D < 0 || Q < 0) throw std::invalid_argument("ARIMA spec: negative order");
    if (d > 2 || D > 1) throw std::invalid_argument("ARIMA spec: supports d <= 2 and D <= 1");
}

double RegArimaFit::beta_of(std::string_view name) const {
    for (std::size_t k = 0; k < xreg_names.size(); ++k) {
        if (xreg_names[k] == name) return beta[k];
    }
    throw ModelError("fit has no regressor '" + std::string(name) + "'");
}

ArmaPoly RegArimaFit::poly() const {
    return {multiply_ar(ar, sar, spec.s), multiply_ma(ma, sma, spec.s)};
}

namespace {

struct Problem {
    ArimaSpec spec;
    Eigen::VectorXd y;   // differenced target
    Eigen::MatrixXd x;   // differenced regressors (+ constant column when a mean is fitted)
    std::vector<std::string> names;
    bool has_mean = false;
};

struct Coefs {
    std::vector<double> ar, ma, sar, sma;
};

Coefs unpack(const ArimaSpec &spec, const Eigen::VectorXd &raw) {
    auto take = [&](int offset, int count) {
        std::vector<double> r(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) r[static_cast<std::size_t>(i)] = std::tanh(raw(offset + i));
        return r;
    };
    Coefs c;
    c.ar = partials_to_ar(take(0, spec.p));
    auto ma = partials_to_ar(take(spec.p, spec.q));
    for (auto &v : ma) v = -v;
    c.ma = std::move(ma);
    c.sar = partials_to_ar(take(spec.p + spec.q, spec.P));
    auto sma = partials_to_ar(take(spec.p + spec.q + spec.P, spec.Q));
    for (auto &v : sma) v = -v;
    c.sma = std::move(sma);
    return c;
}

std::vector<double> to_raw_ar(const std::vector<double> &phi) {
    auto r = ar_to_partials(phi);
    bool ok = true;
    for (double v : r) ok = ok && std::abs(v) < 0.95;
    std::vector<double> raw(r.size(), 0.0);
    if (!ok) return raw;
    for (std::size_t i = 0; i < r.size(); ++i) raw[i] = std::atanh(r[i]);
    return raw;
}

std::vector<double> to_raw_ma(const std::vector<double> &theta) {
    std::vector<double> neg(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) neg[i] = -theta[i];
    return to_raw_ar(neg);
}

ArmaPoly expand(const ArimaSpec &spec, const Coefs &c) {
    return {multiply_ar(c.ar, c.sar, spec.s), multiply_ma(c.ma, c.sma, spec.s)};
}

struct Profile {
    Eigen::VectorXd beta;
    double ssr = 0.0;
    double log_det = 0.0;
    KalmanOutput kalman;
};

// Filters target and regressors together, then solves the weighted least squares
// for beta on the innovations.
Profile profile(const Problem &pb, const ArmaPoly &poly) {
    const Eigen::Index n = pb.y.size();
    Eigen::MatrixXd data(n, 1 + pb.x.cols());
    data.col(0) = pb.y;
    if (pb.x.cols() > 0) data.rightCols(pb.x.cols()) = pb.x;
    Profile out;
    out.kalman = kalman_filter(poly, data);
    const Eigen::VectorXd w = out.kalman.variances.cwiseSqrt().cwiseInverse();
    const Eigen::VectorXd vy = out.kalman.innovations.col(0).cwiseProduct(w);
    Eigen::VectorXd resid = vy;
    if (pb.x.cols() > 0) {
        const Eigen::MatrixXd vx = w.asDiagonal() * out.kalman.innovations.rightCols(pb.x.cols());
        out.beta = vx.colPivHouseholderQr().solve(vy);
        resid -= vx * out.beta;
    }
    out.ssr = resid.squaredNorm();
    out.log_det = out.kalman.variances.array().log().sum();
    return out;
}

double exact_objective(const Problem &pb, const Eigen::VectorXd &raw) {
    if (!raw.allFinite()) return std::numeric_limits<double>::infinity();
    try {
        const auto pr = profile(pb, expand(pb.spec, unpack(pb.spec, raw)));
        const auto n = static_cast<double>(pb.y.size());
        if (!(pr.ssr > 0.0)) return std::numeric_limits<double>::infinity();
        return 0.5 * n * std::log(pr.ssr / n) + 0.5 * pr.log_det;
    } catch (const ModelError &) {
        return std::numeric_limits<double>::infinity();
    }
}

Eigen::VectorXd ols_beta(const Problem &pb) {
    if (pb.x.cols() == 0) return {};
    return pb.x.colPivHouseholderQr().solve(pb.y);
}

double css_objective(const Problem &pb, const Eigen::VectorXd &beta, const Eigen::VectorXd &raw) {
    const auto poly = expand(pb.spec, unpack(pb.spec, raw));
    Eigen::VectorXd w = pb.y;
    if (pb.x.cols() > 0) w -= pb.x * beta;
    const Eigen::Index n = w.size();
    const auto start = static_cast<Eigen::Index>(poly.phi.size());
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    double ss = 0.0;
    for (Eigen::Index t = start; t < n; ++t) {
        double v = w(t);
        for (std::size_t j = 0; j < poly.phi.size(); ++j) v -= poly.phi[j] * w(t - 1 - static_cast<Eigen::Index>(j));
        for (std::size_t j = 0; j < poly.theta.size(); ++j) {
            const Eigen::Index lag = t - 1 - static_cast<Eigen::Index>(j);
            if (lag >= start) v -= poly.theta[j] * e(lag);
        }
        e(t) = v;
        ss += v * v;
    }
    const auto used = static_cast<double>(n - start);
    if (!(ss > 0.0) || !std::isfinite(ss)) return std::numeric_limits<double>::infinity();
    return 0.5 * used * std::log(ss / used);
}

// Least squares of y on columns; returns coefficients.
Eigen::VectorXd lstsq(const Eigen::MatrixXd &a, const Eigen::VectorXd &b) { return a.colPivHouseholderQr().solve(b); }

// Hannan-Rissanen start for the non-seasonal part.
Eigen::VectorXd initial_values(const Problem &pb) {
    const auto &spec = pb.spec;
    Eigen::VectorXd raw = Eigen::VectorXd::Zero(spec.arma_params());
    if (spec.p + spec.q == 0) return raw;
    Eigen::VectorXd w = pb.y;
    if (pb.x.cols() > 0) w -= pb.x * ols_beta(pb);
    const Eigen::Index n = w.size();
    const Eigen::Index m = std::min<Eigen::Index>(std::max<Eigen::Index>(spec.p + spec.q + 2, 8), n / 4);
    const Eigen::Index lead = m + std::max(spec.p, spec.q);
    if (m < 1 || n - lead < 2 * (spec.p + spec.q) + 4) return raw;
    Eigen::MatrixXd lags(n - m, m);
    for (Eigen::Index t = m; t < n; ++t) {
        for (Eigen::Index j = 0; j < m; ++j) lags(t - m, j) = w(t - 1 - j);
    }
    const Eigen::VectorXd long_ar = lstsq(lags, w.tail(n - m));
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e.tail(n - m) = w.tail(n - m) - lags * long_ar;
    Eigen::MatrixXd z(n - lead, spec.p + spec.q);
    for (Eigen::Index t = lead; t < n; ++t) {
        for (int j = 0; j < spec.p; ++j) z(t - lead, j) = w(t - 1 - j);
        for (int j = 0; j < spec.q; ++j) z(t - lead, spec.p + j) = e(t - 1 - j);
    }
    const Eigen::VectorXd c = lstsq(z, w.tail(n - lead));
    if (!c.allFinite()) return raw;
    std::vector<double> ar(c.data(), c.data() + spec.p);
    std::vector<double> ma(c.data() + spec.p, c.data() + spec.p + spec.q);
    const auto ra = to_raw_ar(ar);
    const auto rm = to_raw_ma(ma);
    for (int i = 0; i < spec.p; ++i) raw(i) = ra[static_cast<std::size_t>(i)];
    for (int i = 0; i < spec.q; ++i) raw(spec.p + i) = rm[static_cast<std::size_t>(i)];
    return raw;
}

Problem build_problem(std::span<const double> y, const Eigen::MatrixXd &xreg, const std::vector<std::string> &names,
                      const ArimaSpec &spec, const FitOptions &options) {
    spec.validate();
    const auto n = static_cast<int>(y.size());
    const int ncols = static_cast<int>(xreg.cols());
    const int needed = spec.diff_order() + 3 * spec.arma_params() + ncols;
    if (n <= needed) {
        throw ModelError(spec.to_string() + ": series length " + std::to_string(n) + " must exceed " +
                         std::to_string(needed));
    }
    if (spec.diff_order() + std::max(spec.p, spec.P * spec.s) >= n) {
        throw ModelError(spec.to_string() + ": orders too large for series length " + std::to_string(n));
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw DataError("fit_regarima: series contains non-finite values");
    }
    Problem pb;
    pb.spec = spec;
    const Series dy = tsa::difference(y, spec.d, spec.D, spec.s);
    pb.y = Eigen::Map<const Eigen::VectorXd>(dy.data(), static_cast<Eigen::Index>(dy.size()));
    pb.has_mean = options.include_mean && spec.d == 0 && spec.D == 0;
    const Eigen::Index cols = ncols + (pb.has_mean ? 1 : 0);
    pb.x.resize(pb.y.size(), cols);
    for (int c = 0; c < ncols; ++c) {
        Series col(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) col[static_cast<std::size_t>(t)] = xreg(t, c);
        const Series dc = tsa::difference(col, spec.d, spec.D, spec.s);
        for (std::size_t t = 0; t < dc.size(); ++t) pb.x(static_cast<Eigen::Index>(t), c) = dc[t];
    }
    if (pb.has_mean) pb.x.col(cols - 1).setOnes();
    pb.names = names;
    if (cols > 0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(pb.x);
        qr.setThreshold(1e-10);
        if (qr.rank() < cols) {
            std::string dependent;
            const auto perm = qr.colsPermutation().indices();
            for (Eigen::Index k = qr.rank(); k < cols; ++k) {
                const auto c = perm(k);
                if (!dependent.empty()) dependent += ", ";
                dependent += c < ncols ? names[static_cast<std::size_t>(c)] : std::string("(mean)");
            }
            throw ModelError(spec.to_string() + ": differenced regressors are collinear: " + dependent);
        }
    }
    return pb;
}

bool at_ar_boundary(const ArimaSpec &spec, const Eigen::VectorXd &raw) {
    for (int i = 0; i < spec.p; ++i) {
        if (std::abs(std::tanh(raw(i))) > kBoundary) return true;
    }
    for (int i = 0; i < spec.P; ++i) {
        if (std::abs(std::tanh(raw(spec.p + spec.q + i))) > kBoundary) return true;
    }
    return false;
}

bool at_ma_boundary(const ArimaSpec &spec, const Eigen::VectorXd &raw) {
    for (int i = 0; i < spec.q; ++i) {
        if (std::abs(std::tanh(raw(spec.p + i))) > kBoundary) return true;
    }
    for (int i = 0; i < spec.Q; ++i) {
        if (std::abs(std::tanh(raw(spec.p + spec.q + spec.P + i))) > kBoundary) return true;
    }
    return false;
}

RegArimaFit fit_problem(const Problem &pb, std::span<const double> y, const Eigen::MatrixXd &xreg,
                        const FitOptions &options) {
    const auto &spec = pb.spec;
    const Eigen::VectorXd beta0 = ols_beta(pb);
    Eigen::VectorXd start = initial_values(pb);
    Rng rng(options.seed);
    optim::Result best;
    std::vector<std::string> warnings;
    for (int attempt = 0;; ++attempt) {
        optim::Result stage;
        if (spec.arma_params() > 0) {
            const auto css = optim::nelder_mead(
                [&](const Eigen::VectorXd &raw) { return css_objective(pb, beta0, raw); }, start);
            Eigen::VectorXd from = css.x;
            if (!std::isfinite(exact_objective(pb, from))) from = start;
            optim::BfgsOptions bo;
            bo.max_iterations = 500;
            stage = optim::bfgs([&](const Eigen::VectorXd &raw) { return exact_objective(pb, raw); }, from, bo);
            if (!std::isfinite(stage.value)) {
                throw ModelError(spec.to_string() + ": likelihood is not finite at the starting values");
            }
            if (!stage.converged) {
                throw ModelError(spec.to_string() + ": optimizer did not converge, " + optim::format_trace(stage));
            }
        } else {
            stage.x = start;
            stage.value = exact_objective(pb, start);
            stage.converged = true;
        }
        if (!at_ar_boundary(spec, stage.x)) {
            best = std::move(stage);
            break;
        }
        if (attempt >= options.retries) {
            throw ModelError(spec.to_string() + ": AR estimate is on the stationarity boundary after " +
                             std::to_string(attempt + 1) + " attempts");
        }
        warnings.push_back("AR boundary hit; restarted from a perturbed start");
        start = initial_values(pb);
        for (Eigen::Index i = 0; i < start.size(); ++i) start(i) = 0.5 * start(i) + rng.normal(0.0, 0.3);
    }
    if (at_ma_boundary(spec, best.x)) warnings.push_back("MA polynomial is on the invertibility boundary");

    const Coefs coefs = unpack(spec, best.x);
    const auto pr = profile(pb, expand(spec, coefs));
    RegArimaFit fit;
    fit.spec = spec;
    fit.transform = options.transform;
    fit.xreg_names = pb.names;
    const auto nreg = static_cast<Eigen::Index>(pb.names.size());
    for (Eigen::Index k = 0; k < nreg; ++k) fit.beta.push_back(pr.beta(k));
    fit.has_mean = pb.has_mean;
    if (pb.has_mean) fit.mean = pr.beta(nreg);
    fit.ar = coefs.ar;
    fit.ma = coefs.ma;
    fit.sar = coefs.sar;
    fit.sma = coefs.sma;
    const auto n = static_cast<double>(pb.y.size());
    fit.n_effective = static_cast<std::size_t>(pb.y.size());
    fit.sigma2 = pr.ssr / n;
    fit.loglik = -0.5 * (n * (std::log(2.0 * std::numbers::pi * fit.sigma2) + 1.0) + pr.log_det);
    fit.n_params = spec.arma_params() + static_cast<int>(pb.x.cols()) + 1;
    const double k = fit.n_params;
    fit.aic = -2.0 * fit.loglik + 2.0 * k;
    if (n - k - 1.0 <= 0.0) throw ModelError(spec.to_string() + ": too many parameters for AICc");
    fit.aicc = fit.aic + 2.0 * k * (k + 1.0) / (n - k - 1.0);
    fit.warnings = std::move(warnings);
    fit.y.assign(y.begin(), y.end());
    fit.xreg = xreg;
    return fit;
}

} // namespace

RegArimaFit fit_regarima(std::span<const double> y, const ArimaSpec &spec, const FitOptions &options) {
    const Eigen::MatrixXd none(static_cast<Eigen::Index>(y.size()), 0);
    const auto pb = build_problem(y, none, {}, spec, options);
    return fit_problem(pb, y, none, options);
}

RegArimaFit fit_regarima(std::span<const double> y, const DesignMatrix &xreg, const ArimaSpec &spec,
                         const FitOptions &options) {
    if (xreg.rows() != y.size()) {
        throw std::invalid_argument("fit_regarima: xreg has " + std::to_string(xreg.rows()) + " rows, series has " +
                                    std::to_string(y.size()));
    }
    const auto pb = build_problem(y, xreg.x, xreg.columns, spec, options);
    return fit_problem(pb, y, xreg.x, options);
}

Selection auto_select(std::span<const double> y, const DesignMatrix *xreg, const std::vector<ArimaSpec> &grid,
                      const FitOptions &options) {
    if (grid.empty()) throw std::invalid_argument("auto_select: empty grid");
    std::vector<std::optional<RegArimaFit>> fits(grid.size());
    std::vector<std::string> messages(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        try {
            fits[i] = xreg ? fit_regarima(y, *xreg, grid[i], options) : fit_regarima(y, grid[i], options);
        } catch (const Error &e) {
            messages[i] = e.what();
        }
    });
    Selection sel;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        SelectionRecord rec{grid[i], fits[i].has_value(), 0.0, messages[i]};
        if (fits[i]) {
            rec.aicc = fits[i]->aicc;
            const bool better = !best || fits[i]->aicc < fits[*best]->aicc ||
                                (fits[i]->aicc == fits[*best]->aicc && fits[i]->n_params < fits[*best]->n_params);
            if (better) best = i;
        }
        sel.records.push_back(std::move(rec));
    }
    if (!best) {
        std::string detail;
        for (const auto &r : sel.records) detail += "\n  " + r.spec.to_string() + ": " + r.message;
        throw ModelError("auto_select: every candidate failed" + detail);
    }
    sel.best = std::move(*fits[*best]);
    for (const auto &r : sel.records) {
        if (!r.ok) sel.best.warnings.push_back("skipped " + r.spec.to_string() + ": " + r.message);
    }
    return sel;
}

std::vector<ArimaSpec> default_grid(std::span<const double> y, const DesignMatrix *xreg, const GridOptions &options) {
    Series base(y.begin(), y.end());
    if (xreg && xreg->cols() > 0) {
        const auto n = static_cast<Eigen::Index>(y.size());
        Eigen::MatrixXd a(n, xreg->x.cols() + 1);
        a.leftCols(xreg->x.cols()) = xreg->x;
        a.col(xreg->x.cols()).setOnes();
        const Eigen::Map<const Eigen::VectorXd> yy(y.data(), n);
        const Eigen::VectorXd r = yy - a * lstsq(a, yy);
        base.assign(r.data(), r.data() + n);
    }
    int D = 0;
    if (base.size() >= 2 * static_cast<std::size_t>(options.s)) {
        const auto dec = tsa::seasonal_decompose(base, static_cast<std::size_t>(options.s));
        if (tsa::seasonal_strength(dec) > options.seasonal_threshold) D = 1;
    }
    Series work = tsa::difference(base, 0, D, options.s);
    int d = 0;
    while (d < 2 && work.size() > 8 && tsa::kpss_statistic(work) > tsa::kKpssCritical5) {
        ++d;
        work = tsa::difference(work, 1, 0, 1);
    }
    std::vector<ArimaSpec> grid;
    for (int p = 0; p <= options.max_p; ++p) {
        for (int q = 0; q <= options.max_q; ++q) {
            ArimaSpec s;
            s.p = p;
            s.d = d;
            s.q = q;
            s.D = D;
            s.s = D > 0 ? options.s : 1;
            grid.push_back(s);
        }
    }
    return grid;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

Forecast forecast(const RegArimaFit &fit, int h, const DesignMatrix *xreg_future, double level) {
    if (h < 1) throw std::invalid_argument("forecast: horizon must be >= 1");
    if (!(level > 0.0 && level < 100.0)) throw std::invalid_argument("forecast: level must be in (0, 100)");
    const auto nreg = static_cast<Eigen::Index>(fit.beta.size());
    Eigen::MatrixXd future(h, nreg);
    if (nreg > 0) {
        if (!xreg_future) throw ModelError("forecast: model has regressors but no future values were supplied");
        if (xreg_future->rows() != static_cast<std::size_t>(h)) {
            throw ModelError("forecast: future regressors have " + std::to_string(xreg_future->rows()) +
                             " rows, horizon is " + std::to_string(h));
        }
        future = xreg_future->select(fit.xreg_names);
    }
    const auto n = static_cast<Eigen::Index>(fit.y.size());
    const Eigen::Map<const Eigen::VectorXd> beta(fit.beta.data(), nreg);
    Eigen::VectorXd eta = Eigen::Map<const Eigen::VectorXd>(fit.y.data(), n);
    if (nreg > 0) eta -= fit.xreg * beta;
    const Series eta_s(eta.data(), eta.data() + n);
    Series w = tsa::difference(eta_s, fit.spec.d, fit.spec.D, fit.spec.s);
    for (double &v : w) v -= fit.mean;
    const auto poly = fit.poly();
    const Eigen::MatrixXd data = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    const auto kal = kalman_filter(poly, data);

    // Project the error state forward and integrate back to the original scale.
    Eigen::VectorXd state = kal.state.col(0);
    const auto delta = tsa::differencing_polynomial(fit.spec.d, fit.spec.D, fit.spec.s);
    Series extended = eta_s;
    Forecast out;
    out.horizon = h;
    out.level = level;
    for (int k = 0; k < h; ++k) {
        double value = state(0) + fit.mean;
        for (std::size_t j = 1; j < delta.size(); ++j) value -= delta[j] * extended[extended.size() - j];
        extended.push_back(value);
        Eigen::VectorXd next(state.size());
        for (Eigen::Index i = 0; i < state.size(); ++i) {
            next(i) = (static_cast<std::size_t>(i) < poly.phi.size() ? poly.phi[static_cast<std::size_t>(i)] : 0.0) *
                          state(0) +
                      (i + 1 < state.size() ? state(i + 1) : 0.0);
        }
        state = next;
        double point = value;
        if (nreg > 0) point += future.row(k).dot(beta);
        out.model_point.push_back(point);
    }

    // Psi weights of theta(B) / (phi(B) delta(B)).
    std::vector<double> full_ar(poly.phi.size() + delta.size() - 1, 0.0);
    {
        std::vector<double> a(poly.phi.size() + 1), prod(full_ar.size() + 1, 0.0);
        a[0] = 1.0;
        for (std::size_t j = 0; j < poly.phi.size(); ++j) a[j + 1] = -poly.phi[j];
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t j = 0; j < delta.size(); ++j) prod[i + j] += a[i] * delta[j];
        }
        for (std::size_t j = 1; j < prod.size(); ++j) full_ar[j - 1] = -prod[j];
    }
    const auto psi = psi_weights(full_ar, poly.theta, static_cast<std::size_t>(h));
    const double z = normal_quantile(0.5 + level / 200.0);
    double cum = 0.0;
    for (int k = 0; k < h; ++k) {
        cum += psi[static_cast<std::size_t>(k)] * psi[static_cast<std::size_t>(k)];
        const double se = std::sqrt(fit.sigma2 * cum);
        out.model_se.push_back(se);
        const double p = out.model_point[static_cast<std::size_t>(k)];
        double lo = p - z * se, hi = p + z * se, pt = p;
        if (fit.transform == Transform::sqrt) {
            auto sq = [](double v) { return v > 0.0 ? v * v : 0.0; };
            lo = sq(lo);
            hi = sq(hi);
            pt = sq(pt);
        }
        out.point.push_back(pt);
        out.lower.push_back(lo);
        out.upper.push_back(hi);
    }
    out.xreg_fill.assign(static_cast<std::size_t>(h), "");
    return out;
}

std::vector<std::string> XregFuture::step_labels() const {
    std::vector<std::string> labels;
    for (const auto &row : filled) {
        std::string s;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!row[c]) continue;
            if (!s.empty()) s += ';';
            s += matrix.columns[c];
        }
        labels.push_back(std::move(s));
    }
    return labels;
}

XregFuture lagged_xreg_future(const indices::IndexSeries &idx, const tsa::LagSpec &lag_spec, int h,
                              const Series *si_path) {
    if (h < 1) throw std::invalid_argument("lagged_xreg_future: horizon must be >= 1");
    if (!lag_spec.hdi_lags.empty() || lag_spec.include_median_dom || lag_spec.include_week) {
        throw std::invalid_argument("lagged_xreg_future: only SI lags can be projected forward");
    }
    if (idx.size() == 0) throw std::invalid_argument("lagged_xreg_future: empty index series");
    if (si_path && si_path->size() < static_cast<std::size_t>(h)) {
        throw std::invalid_argument("lagged_xreg_future: SI path shorter than the horizon");
    }
    XregFuture out;
    out.matrix.columns = lag_spec.column_names();
    out.matrix.x.resize(h, static_cast<Eigen::Index>(out.matrix.columns.size()));
    const auto n = static_cast<long>(idx.size());
    const double last = idx.rows.back().si;
    for (int i = 1; i <= h; ++i) {
        std::vector<bool> row;
        Eigen::Index c = 0;
        for (int lag : lag_spec.si_lags) {
            const long t = n - 1 + i - lag; // position of the needed SI value
            double v = 0.0;
            bool filled = false;
            if (lag >= i) {
                v = idx.rows[static_cast<std::size_t>(t)].si;
            } else {
                filled = true;
                v = si_path ? (*si_path)[static_cast<std::size_t>(t - n)] : last;
            }
            out.matrix.x(i - 1, c++) = v;
            row.push_back(filled);
        }
        out.filled.push_back(std::move(row));
        out.matrix.time_index.push_back(static_cast<std::size_t>(n - 1 + i));
    }
    return out;
}

std::string format_forecast_csv(const Forecast &f) {
    std::string out = "step,point,lower,upper,level,xreg_fill\n";
    for (int k = 0; k < f.horizon; ++k) {
        const auto i = static_cast<std::size_t>(k);
        out += std::to_string(k + 1) + ',' + format_double(f.point[i]) + ',' + format_double(f.lower[i]) + ',' +
               format_double(f.upper[i]) + ',' + format_double(f.level) + ',' +
               (i < f.xreg_fill.size() ? f.xreg_fill[i] : std::string()) + '\n';
    }
    return out;
}

} // namespace hdcast::arima
