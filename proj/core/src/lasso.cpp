#include "hdcast/lasso.hpp"


#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace hdcast::lasso {

double Coefficients::coefficient(std::string_view name) const {
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (names[k] == name) return values[k];
    }
    throw ModelError("no coefficient named '" + std::string(name) + "'");
}

Standardized standardize(const DesignMatrix &dm) {
    if (!dm.has_target()) throw ModelError("lasso: design matrix has no target");
    if (dm.rows() < 2) throw ModelError("lasso: need at least two rows");
    Standardized s;
    const auto n = static_cast<double>(dm.rows());
    s.means = dm.x.colwise().mean().transpose();
    s.scales.resize(dm.x.cols());
    s.z = dm.x.rowwise() - s.means.transpose();
    for (Eigen::Index j = 0; j < dm.x.cols(); ++j) {
        const double sd = std::sqrt(s.z.col(j).squaredNorm() / n);
        if (!(sd > 0.0)) throw ModelError("lasso: column '" + dm.columns[static_cast<std::size_t>(j)] + "' is constant");
        s.scales(j) = sd;
        s.z.col(j) /= sd;
    }
    s.target_mean = dm.target.mean();
    s.y = dm.target.array() - s.target_mean;
    return s;
}

namespace {

Coefficients unstandardize(const LarPath &path, Eigen::VectorXd beta) {
    Coefficients c;
    c.names = path.columns;
    c.intercept = path.target_mean;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double v = beta(j) / path.scales(j);
        c.values.push_back(v);
        c.intercept -= v * path.means(j);
    }
    c.standardized = std::move(beta);
    return c;
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

} // namespace

LarPath lar_path(const DesignMatrix &dm, PathMode mode) {
    const Standardized s = standardize(dm);
    const Eigen::Index n = s.z.rows();
    const Eigen::Index p = s.z.cols();

    LarPath path;
    path.mode = mode;
    path.columns = dm.columns;
    path.means = s.means;
    path.scales = s.scales;
    path.target_mean = s.target_mean;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd corr = s.z.transpose() * s.y;
    Eigen::Index first = 0;
    const double lambda0 = corr.cwiseAbs().maxCoeff(&first);
    path.breakpoints.push_back({lambda0, beta, {}, "start"});
    if (lambda0 <= 0.0) return path;

    const double tiny = 1e-12 * std::max(1.0, lambda0);
    const Eigen::Index max_active = std::min<Eigen::Index>(p, n - 1);
    std::vector<std::size_t> active{static_cast<std::size_t>(first)};
    std::vector<bool> in_active(static_cast<std::size_t>(p), false);
    in_active[static_cast<std::size_t>(first)] = true;
    std::optional<std::size_t> just_dropped;
    std::string pending_event = "add " + dm.columns[static_cast<std::size_t>(first)];

    for (int guard = 0; guard < 8 * (p + 1) + 8; ++guard) {
        const Eigen::VectorXd resid = s.y - s.z * beta;
        corr = s.z.transpose() * resid;
        const auto k = static_cast<Eigen::Index>(active.size());
        double big_c = 0.0;
        for (auto j : active) big_c = std::max(big_c, std::abs(corr(static_cast<Eigen::Index>(j))));

        Eigen::MatrixXd za(n, k);
        Eigen::VectorXd signs(k);
        for (Eigen::Index a = 0; a < k; ++a) {
            const auto j = static_cast<Eigen::Index>(active[static_cast<std::size_t>(a)]);
            signs(a) = beta(j) != 0.0 ? sign_of(beta(j)) : sign_of(corr(j));
            if (signs(a) == 0.0) signs(a) = 1.0;
            za.col(a) = s.z.col(j) * signs(a);
        }
        const Eigen::MatrixXd gram = za.transpose() * za;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        const Eigen::VectorXd ginv_one = ldlt.solve(Eigen::VectorXd::Ones(k));
        const double denom = ginv_one.sum();
        if (ldlt.info() != Eigen::Success || !(denom > 0.0) || !std::isfinite(denom)) break;
        const double a_a = 1.0 / std::sqrt(denom);
        const Eigen::VectorXd w = a_a * ginv_one;
        const Eigen::VectorXd u = za * w;
        const Eigen::VectorXd a = s.z.transpose() * u;

        double gamma = big_c / a_a; // reaches the least-squares fit on the active set
        std::optional<std::size_t> entering;
        if (k < max_active) {
            for (Eigen::Index j = 0; j < p; ++j) {
                if (in_active[static_cast<std::size_t>(j)] || just_dropped == static_cast<std::size_t>(j)) continue;
                for (double cand : {(big_c - corr(j)) / (a_a - a(j)), (big_c + corr(j)) / (a_a + a(j))}) {
                    if (cand > tiny && cand < gamma) {
                        gamma = cand;
                        entering = static_cast<std::size_t>(j);
                    }
                }
            }
        }
        std::optional<std::size_t> leaving;
        if (mode == PathMode::lasso) {
            for (Eigen::Index ai = 0; ai < k; ++ai) {
                const auto j = static_cast<Eigen::Index>(active[static_cast<std::size_t>(ai)]);
                const double direction = signs(ai) * w(ai);
                if (beta(j) == 0.0 || direction == 0.0) continue;
                const double cand = -beta(j) / direction;
                if (cand > tiny && cand < gamma) {
                    gamma = cand;
                    leaving = static_cast<std::size_t>(ai);
                    entering.reset();
                }
            }
        }

        for (Eigen::Index ai = 0; ai < k; ++ai) {
            const auto j = static_cast<Eigen::Index>(active[static_cast<std::size_t>(ai)]);
            beta(j) += gamma * signs(ai) * w(ai);
        }
        just_dropped.reset();
        double lambda = std::max(0.0, big_c - gamma * a_a);
        std::string event = pending_event;
        pending_event.clear();
        if (leaving) {
            const std::size_t j = active[*leaving];
            beta(static_cast<Eigen::Index>(j)) = 0.0;
            active.erase(active.begin() + static_cast<std::ptrdiff_t>(*leaving));
            in_active[j] = false;
            just_dropped = j;
            pending_event = "drop " + dm.columns[j];
        } else if (entering) {
            active.push_back(*entering);
            in_active[*entering] = true;
            pending_event = "add " + dm.columns[*entering];
        } else {
            lambda = 0.0;
        }
        // Keep lambda strictly decreasing: a zero-length move only updates the set.
        if (lambda >= path.breakpoints.back().lambda - tiny) {
            path.breakpoints.back().active = active;
            path.breakpoints.back().beta = beta;
        } else {
            path.breakpoints.push_back({lambda, beta, active, event});
        }
        if (lambda <= tiny || active.empty()) {
            path.breakpoints.back().event = event.empty() ? "end" : event;
            break;
        }
    }
    return path;
}

Coefficients coefficients_at(const LarPath &path, double lambda) {
    const auto &bps = path.breakpoints;
    if (lambda >= bps.front().lambda) return unstandardize(path, bps.front().beta);
    if (lambda <= bps.back().lambda) return unstandardize(path, bps.back().beta);
    for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
        const auto &hi = bps[k];
        const auto &lo = bps[k + 1];
        if (lambda <= hi.lambda && lambda >= lo.lambda) {
            const double t = (hi.lambda - lambda) / (hi.lambda - lo.lambda);
            return unstandardize(path, (1.0 - t) * hi.beta + t * lo.beta);
        }
    }
    return unstandardize(path, bps.back().beta);
}

Coefficients cd_lasso(const DesignMatrix &dm, double lambda, const CdOptions &options) {
    if (lambda < 0.0) throw std::invalid_argument("cd_lasso: lambda must be non-negative");
    const Standardized s = standardize(dm);
    const Eigen::Index p = s.z.cols();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd resid = s.y;
    const Eigen::VectorXd norms = s.z.colwise().squaredNorm().transpose();
    bool converged = false;
    for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double rho = s.z.col(j).dot(resid) + norms(j) * beta(j);
            const double shrunk = std::copysign(std::max(std::abs(rho) - lambda, 0.0), rho) / norms(j);
            const double change = shrunk - beta(j);
            if (change != 0.0) {
                resid -= change * s.z.col(j);
                beta(j) = shrunk;
                max_change = std::max(max_change, std::abs(change));
            }
        }
        if (max_change < options.tolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw ModelError("cd_lasso: no convergence after " + std::to_string(options.max_sweeps) + " sweeps");
    }
    LarPath frame;
    frame.columns = dm.columns;
    frame.means = s.means;
    frame.scales = s.scales;
    frame.target_mean = s.target_mean;
    return unstandardize(frame, beta);
}

Eigen::VectorXd predict(const Coefficients &coef, const DesignMatrix &dm) {
    const Eigen::MatrixXd x = dm.select(coef.names);
    const Eigen::Map<const Eigen::VectorXd> b(coef.values.data(), static_cast<Eigen::Index>(coef.values.size()));
    return (x * b).array() + coef.intercept;
}

LambdaSelection select_lambda_rolling(const DesignMatrix &dm, PathMode mode, std::size_t min_train,
                                      std::size_t grid_size) {
    if (grid_size < 2) throw std::invalid_argument("select_lambda_rolling: grid needs at least two points");
    if (min_train < 3 || min_train >= dm.rows()) {
        throw std::invalid_argument("select_lambda_rolling: min_train must leave at least one evaluation row");
    }
    LambdaSelection sel;
    // Geometric grid from 1 down to 1e-4 of lambda_max, plus the unpenalised end.
    for (std::size_t g = 0; g + 1 < grid_size; ++g) {
        sel.fractions.push_back(std::pow(1e-4, static_cast<double>(g) / static_cast<double>(grid_size - 2)));
    }
    sel.fractions.push_back(0.0);
    std::vector<std::vector<double>> errors(sel.fractions.size());
    for (std::size_t origin = min_train; origin < dm.rows(); ++origin) {
        const DesignMatrix train = dm.head(origin);
        LarPath path;
        try {
            path = lar_path(train, mode);
        } catch (const ModelError &) {
            continue; // a column can be constant on a short prefix
        }
        const DesignMatrix next = dm.select_rows(std::vector<std::size_t>{origin});
        const double actual = next.target(0) * next.target(0);
        if (actual == 0.0) continue;
        for (std::size_t g = 0; g < sel.fractions.size(); ++g) {
            const auto coef = coefficients_at(path, sel.fractions[g] * path.lambda_max());
            const double pred = std::max(0.0, predict(coef, next)(0));
            errors[g].push_back(std::abs(actual - pred * pred) / actual);
        }
    }
    sel.mape = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < sel.fractions.size(); ++g) {
        if (errors[g].empty()) {
            sel.mapes.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        double total = 0.0;
        for (double e : errors[g]) total += e;
        const double m = 100.0 * total / static_cast<double>(errors[g].size());
        sel.mapes.push_back(m);
        if (m < sel.mape) {
            sel.mape = m;
            sel.fraction = sel.fractions[g];
        }
    }
    if (!std::isfinite(sel.mape)) throw ModelError("select_lambda_rolling: no origin could be evaluated");
    sel.lambda = sel.fraction * lar_path(dm, mode).lambda_max();
    return sel;
}

std::string format_path_csv(const LarPath &path) {
    std::string out = "step,lambda,active_set,l1_norm";
    for (const auto &c : path.columns) out += ",coef_" + c;
    out += '\n';
    for (std::size_t k = 0; k < path.breakpoints.size(); ++k) {
        const auto &bp = path.breakpoints[k];
        std::string active;
        for (auto j : bp.active) {
            if (!active.empty()) active += ';';
            active += path.columns[j];
        }
        out += std::to_string(k) + ',' + format_double(bp.lambda) + ',' + active + ',' +
               format_double(bp.beta.lpNorm<1>());
        for (Eigen::Index j = 0; j < bp.beta.size(); ++j) out += ',' + format_double(bp.beta(j) / path.scales(j));
        out += '\n';
    }
    return out;
}

} // namespace hdcast::lasso
