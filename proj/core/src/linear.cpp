#include "hdcast/linear.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>

namespace hdcast::linear {

double LinearFit::coefficient(std::string_view name) const {
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (names[k] == name) return coefficients[k];
    }
    throw ModelError("fit has no coefficient '" + std::string(name) + "'");
}

double r_squared(const Eigen::VectorXd &actual, const Eigen::VectorXd &predicted) {
    const double sst = (actual.array() - actual.mean()).square().sum();
    if (sst <= 0.0) return 0.0;
    const double ssr = (actual - predicted).squaredNorm();
    return 1.0 - ssr / sst;
}

double adjusted_r_squared(double r2, std::size_t n, std::size_t p) {
    if (n <= p + 1) return std::numeric_limits<double>::quiet_NaN();
    return 1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - p - 1);
}

LinearFit ols_fit(const DesignMatrix &dm) { return ols_fit(dm, dm.columns); }

LinearFit ols_fit(const DesignMatrix &dm, std::span<const std::string> columns) {
    if (!dm.has_target()) throw ModelError("ols_fit: design matrix has no target");
    const std::size_t n = dm.rows();
    const std::size_t p = columns.size();
    if (n <= p + 1) {
        throw ModelError("ols_fit: need more rows (" + std::to_string(n) + ") than predictors + 1 (" +
                         std::to_string(p + 1) + ")");
    }
    const Eigen::MatrixXd x = dm.select(columns);
    const Eigen::VectorXd &y = dm.target;
    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const double y_mean = y.mean();
    const Eigen::MatrixXd xc = x.rowwise() - x_mean;
    const Eigen::VectorXd yc = y.array() - y_mean;

    LinearFit fit;
    fit.names.assign(columns.begin(), columns.end());
    fit.n = n;
    fit.p = p;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    if (p > 0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
        qr.setThreshold(1e-10);
        if (static_cast<std::size_t>(qr.rank()) < p) {
            std::string dependent;
            const auto &perm = qr.colsPermutation().indices();
            for (Eigen::Index k = qr.rank(); k < static_cast<Eigen::Index>(p); ++k) {
                if (!dependent.empty()) dependent += ", ";
                dependent += columns[static_cast<std::size_t>(perm(k))];
                if (xc.col(perm(k)).squaredNorm() == 0.0) dependent += " (constant)";
            }
            throw ModelError("ols_fit: design is rank deficient; dependent columns: " + dependent);
        }
        beta = qr.solve(yc);
    }
    fit.coefficients.assign(beta.data(), beta.data() + beta.size());
    fit.intercept = y_mean - (p > 0 ? (x_mean * beta)(0) : 0.0);
    fit.residuals = yc - xc * beta;
    const double ssr = fit.residuals.squaredNorm();
    const double sst = yc.squaredNorm();
    fit.r2 = sst > 0.0 ? std::clamp(1.0 - ssr / sst, 0.0, 1.0) : 0.0;
    fit.adj_r2 = adjusted_r_squared(fit.r2, n, p);
    fit.sigma2 = ssr / static_cast<double>(n - p - 1);
    fit.aic = static_cast<double>(n) * std::log(std::max(ssr, std::numeric_limits<double>::min()) / static_cast<double>(n)) +
              2.0 * static_cast<double>(p + 1);

    if (p > 0) {
        const Eigen::MatrixXd cov = (xc.transpose() * xc).ldlt().solve(Eigen::MatrixXd::Identity(
                                        static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p))) *
                                    fit.sigma2;
        for (std::size_t k = 0; k < p; ++k) {
            const double se = std::sqrt(std::max(0.0, cov(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))));
            fit.std_errors.push_back(se);
            fit.t_values.push_back(se > 0.0 ? fit.coefficients[k] / se : std::numeric_limits<double>::infinity());
        }
    }
    return fit;
}

namespace {

double two_sided_p(double t, std::size_t df) {
    if (!std::isfinite(t)) return 0.0;
    boost::math::students_t dist(static_cast<double>(df));
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

} // namespace

LinearFit forward_stepwise(const DesignMatrix &dm, const StepwiseOptions &options) {
    std::vector<std::string> selected;
    std::vector<bool> used(dm.cols(), false);
    LinearFit current = ols_fit(dm, selected);
    const std::size_t limit = options.max_steps == 0 ? dm.cols() : std::min(options.max_steps, dm.cols());

    while (selected.size() < limit) {
        if (current.residuals.squaredNorm() <= 1e-24 * std::max(1.0, dm.target.squaredNorm())) break;
        std::optional<std::size_t> best;
        LinearFit best_fit;
        double best_score = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < dm.cols(); ++j) {
            if (used[j]) continue;
            auto trial_cols = selected;
            trial_cols.push_back(dm.columns[j]);
            if (dm.rows() <= trial_cols.size() + 1) continue;
            LinearFit trial;
            try {
                trial = ols_fit(dm, trial_cols);
            } catch (const ModelError &) {
                continue; // candidate is collinear with the current set
            }
            double score;
            if (options.criterion == StepCriterion::aic) {
                score = trial.aic;
            } else {
                score = two_sided_p(trial.t_values.back(), trial.n - trial.p - 1);
            }
            if (score < best_score) {
                best_score = score;
                best = j;
                best_fit = std::move(trial);
            }
        }
        if (!best) break;
        const bool improves = options.criterion == StepCriterion::aic ? best_score < current.aic
                                                                      : best_score < options.alpha;
        if (!improves) break;
        used[*best] = true;
        selected.push_back(dm.columns[*best]);
        current = std::move(best_fit);
    }
    current.selection_order = selected;
    return current;
}

Eigen::VectorXd predict(const LinearFit &fit, const DesignMatrix &dm) {
    Eigen::VectorXd out = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dm.rows()), fit.intercept);
    if (fit.names.empty()) return out;
    const Eigen::MatrixXd x = dm.select(fit.names);
    const Eigen::Map<const Eigen::VectorXd> beta(fit.coefficients.data(), static_cast<Eigen::Index>(fit.coefficients.size()));
    out += x * beta;
    return out;
}

} // namespace hdcast::linear
