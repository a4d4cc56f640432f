#pragma once

#include "hdcast/design.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace hdcast::evaluation {

enum class SplitMode { random, chronological };

struct Split {
    DesignMatrix train;
    DesignMatrix test;
    std::vector<std::size_t> train_rows; // ascending
    std::vector<std::size_t> test_rows;  // ascending
};

/// Train size is floor(fraction * n). Random mode draws rows without replacement.
Split split_train_test(const DesignMatrix &dm, double fraction, SplitMode mode, std::uint64_t seed = 0);

/// 100/n * sum |a - p| / |a|. Throws DataError naming the first zero actual.
double mape(std::span<const double> actual, std::span<const double> predicted);
double mape(const Eigen::VectorXd &actual, const Eigen::VectorXd &predicted);

/// Scale on which model targets live; MAPE is always reported on the HDI scale.
enum class TargetScale { identity, sqrt };
Eigen::VectorXd to_report_scale(const Eigen::VectorXd &v, TargetScale scale);

/// Returns predictions for `test` from a model fitted on `train`.
using Fitter = std::function<Eigen::VectorXd(const DesignMatrix &train, const DesignMatrix &test)>;

struct FoldResult {
    std::size_t fold = 0;
    std::size_t size = 0;
    bool ok = false;
    double r2 = 0.0;
    double mape = 0.0;
    std::string message;
};

struct CvResult {
    std::vector<FoldResult> folds;
    double mean_r2 = 0.0;
    double mean_mape = 0.0;
    std::size_t failed = 0;
};

/// The first n % k folds hold one extra row.
std::vector<std::size_t> fold_sizes(std::size_t n, std::size_t k);
CvResult kfold_cv(const DesignMatrix &dm, std::size_t k, const Fitter &fitter, std::uint64_t seed,
                  TargetScale scale = TargetScale::sqrt);

/// h forecasts from a model fitted on `train` (values on the reported scale).
using Forecaster = std::function<Series(std::span<const double> train, int h)>;

struct OriginResult {
    std::size_t train_size = 0;
    bool ok = false;
    Series forecast;
    Series actual;
    std::string message;
};

struct RollingResult {
    int horizon = 0;
    std::vector<OriginResult> origins;
    Series mape_by_step; // step 1..h over successful origins
    double mape_at_h = 0.0;
    double mape_mean = 0.0; // average over steps 1..h
    std::size_t failed = 0;
};

/// Origins t = min_train .. n - h; each fits on y[0, t) and scores y[t, t + h).
RollingResult rolling_origin(std::span<const double> y, const Forecaster &forecaster, int h, std::size_t min_train);

struct Baselines {
    Series constant;
    Series mean;
};

inline constexpr std::size_t kMeanWindow = 10;
Baselines baseline_forecasts(std::span<const double> y, int h, std::size_t window = kMeanWindow);

struct EvalReport {
    std::string model;
    std::string split; // "random", "chronological" or "rolling-origin"
    int horizon = 0;
    double mape = 0.0;
    double mape_at_h = 0.0;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    std::map<std::string, double> baseline_mapes;         // constant, mean
    std::map<std::string, double> baseline_mapes_at_h;
    std::vector<FoldResult> folds;
    Series mape_by_step;
};

} // namespace hdcast::evaluation
