#pragma once

#include "hdcast/indices.hpp"
#include "hdcast/ingest.hpp"

#include <Eigen/Dense>

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace hdcast {

/// Named predictor columns aligned row-by-row with a target vector.
/// `time_index[i]` is the position of row i in the source weekly series.
struct DesignMatrix {
    std::vector<std::string> columns;
    Eigen::MatrixXd x;
    Eigen::VectorXd target; // empty for rows whose outcome is not yet observed
    std::vector<std::size_t> time_index;

    std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
    std::size_t cols() const { return columns.size(); }
    bool has_target() const { return target.size() == x.rows() && x.rows() > 0; }

    std::optional<std::size_t> find(std::string_view name) const;
    /// Columns in the requested order; throws ModelError naming the first missing one.
    Eigen::MatrixXd select(std::span<const std::string> names) const;
    DesignMatrix select_rows(std::span<const std::size_t> rows) const;
    DesignMatrix head(std::size_t n) const;
    DesignMatrix tail_from(std::size_t first_row) const;
    /// Column-wise concatenation; both sides must have the same row count.
    DesignMatrix hcat(const DesignMatrix &other) const;
};

namespace tsa {

/// Which lagged and contemporaneous predictors to assemble.
struct LagSpec {
    std::string target_name = "hdi_sqrt";
    std::set<int> si_lags;  // 0 allowed (current-week SI)
    std::set<int> hdi_lags; // strictly positive
    bool include_median_dom = false;
    bool include_week = false;

    int max_lag() const;
    bool empty() const { return si_lags.empty() && hdi_lags.empty() && !include_median_dom && !include_week; }
    std::vector<std::string> column_names() const;

    // SI-L2..L11 and HDI-L2..L11 plus median_dom: two-week-ahead heat index.
    static LagSpec short_term();
    // SI, SI-L5..L20, median_dom, week, HDI-L5..L20 (35 predictors).
    static LagSpec lasso35();
    // SI-L5..L20, the exogenous block of the regression-with-ARIMA-errors model.
    static LagSpec arimax();
    static LagSpec preset(std::string_view name);
};

/// Parses "5-20", "2,4,6" or "0,5-20" into a lag set.
std::set<int> parse_lag_list(std::string_view text);

DesignMatrix build_design_matrix(const indices::IndexSeries &idx, const ingest::WeeklySeries &weekly,
                                 const LagSpec &spec);

inline constexpr double kWeeksPerYear = 365.25 / 7.0;

/// sin/cos pairs for harmonics j = 1..K at times t = first_t .. first_t+n-1.
DesignMatrix fourier_terms(std::size_t n, int harmonics, double period = 52.18, std::size_t first_t = 1);

std::string format_design_csv(const DesignMatrix &dm);

} // namespace tsa
} // namespace hdcast
