#include "hdcast/indices.hpp"

#include <cmath>
#include <stdexcept>

namespace hdcast::indices {

Series IndexSeries::hdi() const {
    Series out;
    for (const auto &r : rows) out.push_back(r.hdi);
    return out;
}

Series IndexSeries::si() const {
    Series out;
    for (const auto &r : rows) out.push_back(r.si);
    return out;
}

Series IndexSeries::hdi_sqrt() const {
    Series out;
    for (const auto &r : rows) out.push_back(r.hdi_sqrt);
    return out;
}

IndexSeries compute_indices(const ingest::WeeklySeries &series) {
    IndexSeries out;
    out.rows.reserve(series.size());
    for (const auto &r : series.records) {
        if (r.on_market <= 0) {
            throw DataError("on_market is zero in " + std::to_string(r.year) + " week " + std::to_string(r.week) +
                            "; indices undefined");
        }
        const double stock = static_cast<double>(r.on_market);
        const double hdi = static_cast<double>(r.sold) / stock;
        out.rows.push_back({r.year, r.week, hdi, static_cast<double>(r.showings) / stock, std::sqrt(hdi)});
    }
    return out;
}

double inverse_transform(double hdi_sqrt_value) {
    if (!(hdi_sqrt_value >= 0.0)) throw std::invalid_argument("inverse_transform: input must be non-negative");
    return hdi_sqrt_value * hdi_sqrt_value;
}

double price_elasticity(double dq_over_q, double dp_over_p) {
    if (dp_over_p == 0.0) throw std::invalid_argument("price_elasticity: relative price change is zero");
    return dq_over_q / dp_over_p;
}

std::string format_index_csv(const IndexSeries &series) {
    std::string out(kIndexHeader);
    out += '\n';
    for (const auto &r : series.rows) {
        out += std::to_string(r.year) + ',' + std::to_string(r.week) + ',' + format_significant(r.hdi, 10) + ',' +
               format_significant(r.si, 10) + ',' + format_significant(r.hdi_sqrt, 10) + '\n';
    }
    return out;
}

} // namespace hdcast::indices
