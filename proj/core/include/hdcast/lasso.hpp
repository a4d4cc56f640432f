#pragma once

#include "hdcast/design.hpp"

#include <string>
#include <vector>

namespace hdcast::lasso {

enum class PathMode { lar, lasso };

struct Breakpoint {
    double lambda = 0.0;          // max |x_j' r| on the standardised scale
    Eigen::VectorXd beta;         // standardised-scale coefficients
    std::vector<std::size_t> active; // column indices in order of entry
    std::string event;            // "start", "add <col>", "drop <col>", "end"
};

/// Piecewise-linear coefficient path of the lasso (or plain LAR) in the dual
/// penalty lambda. Columns are centred and scaled by their population standard
/// deviation; the target is centred.
struct LarPath {
    PathMode mode = PathMode::lasso;
    std::vector<std::string> columns;
    Eigen::VectorXd means;
    Eigen::VectorXd scales;
    double target_mean = 0.0;
    std::vector<Breakpoint> breakpoints;

    double lambda_max() const { return breakpoints.front().lambda; }
};

struct Coefficients {
    Eigen::VectorXd standardized;
    std::vector<std::string> names;
    std::vector<double> values; // original column scale
    double intercept = 0.0;

    double coefficient(std::string_view name) const;
};

LarPath lar_path(const DesignMatrix &dm, PathMode mode = PathMode::lasso);

/// Linear interpolation between the bracketing breakpoints. lambda above the
/// first breakpoint gives all zeros; below the last gives the path end.
Coefficients coefficients_at(const LarPath &path, double lambda);

struct CdOptions {
    double tolerance = 1e-10;
    std::size_t max_sweeps = 100000;
};

/// Cyclic coordinate descent on 0.5 ||Z b - y||^2 + lambda ||b||_1 with the same
/// standardisation as lar_path.
Coefficients cd_lasso(const DesignMatrix &dm, double lambda, const CdOptions &options = {});

Eigen::VectorXd predict(const Coefficients &coef, const DesignMatrix &dm);

struct Standardized {
    Eigen::MatrixXd z;
    Eigen::VectorXd y;
    Eigen::VectorXd means;
    Eigen::VectorXd scales;
    double target_mean = 0.0;
};

/// Throws ModelError naming any constant column.
Standardized standardize(const DesignMatrix &dm);

/// Picks lambda (as a fraction of lambda_max) minimising rolling one-step MAPE on
/// the HDI scale; the target is assumed to be on the square-root scale.
struct LambdaSelection {
    double fraction = 1.0;
    double lambda = 0.0; // on the full-data path
    double mape = 0.0;
    std::vector<double> fractions;
    std::vector<double> mapes;
};
LambdaSelection select_lambda_rolling(const DesignMatrix &dm, PathMode mode, std::size_t min_train,
                                      std::size_t grid_size = 40);

std::string format_path_csv(const LarPath &path);

} // namespace hdcast::lasso
