#pragma once

#include "hdcast/ingest.hpp"

#include <string>
#include <vector>

namespace hdcast::indices {

struct IndexRow {
    int year = 0;
    int week = 1;
    double hdi = 0.0;      // sold / on_market
    double si = 0.0;       // showings / on_market
    double hdi_sqrt = 0.0; // modelling scale
};

struct IndexSeries {
    std::vector<IndexRow> rows;

    std::size_t size() const { return rows.size(); }
    Series hdi() const;
    Series si() const;
    Series hdi_sqrt() const;
};

/// Housing-demand and showing indices per week. Throws DataError naming the
/// first week whose on_market count is zero.
IndexSeries compute_indices(const ingest::WeeklySeries &series);

/// Maps a value on the square-root modelling scale back to the HDI scale.
double inverse_transform(double hdi_sqrt_value);

/// Ratio of relative quantity change to relative price change.
double price_elasticity(double dq_over_q, double dp_over_p);

inline constexpr std::string_view kIndexHeader = "year,week,hdi,si,hdi_sqrt";
std::string format_index_csv(const IndexSeries &series);

} // namespace hdcast::indices
