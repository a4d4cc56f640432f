#include "hdcast/design.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hdcast {

std::optional<std::size_t> DesignMatrix::find(std::string_view name) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] == name) return j;
    }
    return std::nullopt;
}

Eigen::MatrixXd DesignMatrix::select(std::span<const std::string> names) const {
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t k = 0; k < names.size(); ++k) {
        const auto j = find(names[k]);
        if (!j) throw ModelError("design matrix lacks column '" + names[k] + "'");
        out.col(static_cast<Eigen::Index>(k)) = x.col(static_cast<Eigen::Index>(*j));
    }
    return out;
}

DesignMatrix DesignMatrix::select_rows(std::span<const std::size_t> rows_wanted) const {
    DesignMatrix out;
    out.columns = columns;
    out.x.resize(static_cast<Eigen::Index>(rows_wanted.size()), x.cols());
    if (has_target()) out.target.resize(static_cast<Eigen::Index>(rows_wanted.size()));
    for (std::size_t i = 0; i < rows_wanted.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(rows_wanted[i]);
        if (r >= x.rows()) throw std::out_of_range("DesignMatrix::select_rows: row out of range");
        out.x.row(static_cast<Eigen::Index>(i)) = x.row(r);
        if (has_target()) out.target(static_cast<Eigen::Index>(i)) = target(r);
        if (!time_index.empty()) out.time_index.push_back(time_index[rows_wanted[i]]);
    }
    return out;
}

DesignMatrix DesignMatrix::head(std::size_t n) const {
    std::vector<std::size_t> idx(std::min(n, rows()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return select_rows(idx);
}

DesignMatrix DesignMatrix::tail_from(std::size_t first_row) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = first_row; i < rows(); ++i) idx.push_back(i);
    return select_rows(idx);
}

DesignMatrix DesignMatrix::hcat(const DesignMatrix &other) const {
    if (rows() != other.rows()) throw std::invalid_argument("DesignMatrix::hcat: row counts differ");
    DesignMatrix out;
    out.columns = columns;
    out.columns.insert(out.columns.end(), other.columns.begin(), other.columns.end());
    out.x.resize(x.rows(), x.cols() + other.x.cols());
    out.x << x, other.x;
    out.target = has_target() ? target : other.target;
    out.time_index = time_index.empty() ? other.time_index : time_index;
    return out;
}

namespace tsa {

int LagSpec::max_lag() const {
    int m = 0;
    if (!si_lags.empty()) m = std::max(m, *si_lags.rbegin());
    if (!hdi_lags.empty()) m = std::max(m, *hdi_lags.rbegin());
    return m;
}

std::vector<std::string> LagSpec::column_names() const {
    std::vector<std::string> names;
    for (int k : si_lags) names.push_back("SI-L" + std::to_string(k));
    if (include_median_dom) names.emplace_back("median_dom");
    if (include_week) names.emplace_back("week");
    for (int k : hdi_lags) names.push_back("HDI-L" + std::to_string(k));
    return names;
}

namespace {
std::set<int> range_set(int lo, int hi) {
    std::set<int> s;
    for (int k = lo; k <= hi; ++k) s.insert(k);
    return s;
}
} // namespace

LagSpec LagSpec::short_term() {
    LagSpec s;
    s.si_lags = range_set(2, 11);
    s.hdi_lags = range_set(2, 11);
    s.include_median_dom = true;
    return s;
}

LagSpec LagSpec::lasso35() {
    LagSpec s;
    s.si_lags = range_set(5, 20);
    s.si_lags.insert(0);
    s.hdi_lags = range_set(5, 20);
    s.include_median_dom = true;
    s.include_week = true;
    return s;
}

LagSpec LagSpec::arimax() {
    LagSpec s;
    s.si_lags = range_set(5, 20);
    return s;
}

LagSpec LagSpec::preset(std::string_view name) {
    if (name == "short") return short_term();
    if (name == "lasso35") return lasso35();
    if (name == "arimax") return arimax();
    throw std::invalid_argument("unknown lag preset '" + std::string(name) + "' (short, lasso35, arimax)");
}

std::set<int> parse_lag_list(std::string_view text) {
    std::set<int> out;
    auto to_int = [&](std::string_view s) {
        int v{};
        auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || end != s.data() + s.size() || v < 0) {
            throw std::invalid_argument("bad lag list '" + std::string(text) + "'");
        }
        return v;
    };
    for (auto part : split_csv_line(text)) {
        if (part.empty()) continue;
        const auto dash = part.find('-');
        if (dash == std::string_view::npos) {
            out.insert(to_int(part));
        } else {
            const int lo = to_int(part.substr(0, dash));
            const int hi = to_int(part.substr(dash + 1));
            if (hi < lo) throw std::invalid_argument("bad lag range '" + std::string(part) + "'");
            for (int k = lo; k <= hi; ++k) out.insert(k);
        }
    }
    return out;
}

DesignMatrix build_design_matrix(const indices::IndexSeries &idx, const ingest::WeeklySeries &weekly,
                                 const LagSpec &spec) {
    if (spec.empty()) throw std::invalid_argument("build_design_matrix: lag spec selects no predictors");
    if (idx.size() != weekly.size()) throw std::invalid_argument("build_design_matrix: index/weekly length mismatch");
    for (int k : spec.hdi_lags) {
        if (k <= 0) throw std::invalid_argument("build_design_matrix: HDI lags must be positive");
    }
    if (!spec.si_lags.empty() && *spec.si_lags.begin() < 0) {
        throw std::invalid_argument("build_design_matrix: SI lags must be non-negative");
    }
    const std::size_t n = idx.size();
    const auto max_lag = static_cast<std::size_t>(spec.max_lag());
    if (max_lag >= n) {
        throw DataError("build_design_matrix: max lag " + std::to_string(max_lag) + " not below series length " +
                        std::to_string(n));
    }
    DesignMatrix dm;
    dm.columns = spec.column_names();
    const std::size_t rows = n - max_lag;
    dm.x.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dm.columns.size()));
    dm.target.resize(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t t = i + max_lag;
        const auto r = static_cast<Eigen::Index>(i);
        Eigen::Index c = 0;
        for (int k : spec.si_lags) dm.x(r, c++) = idx.rows[t - static_cast<std::size_t>(k)].si;
        if (spec.include_median_dom) dm.x(r, c++) = weekly.records[t].median_dom;
        if (spec.include_week) dm.x(r, c++) = weekly.records[t].week;
        for (int k : spec.hdi_lags) dm.x(r, c++) = idx.rows[t - static_cast<std::size_t>(k)].hdi;
        dm.target(r) = idx.rows[t].hdi_sqrt;
        dm.time_index.push_back(t);
    }
    return dm;
}

DesignMatrix fourier_terms(std::size_t n, int harmonics, double period, std::size_t first_t) {
    if (harmonics < 1) throw std::invalid_argument("fourier_terms: need at least one harmonic");
    if (2.0 * harmonics >= period) {
        throw std::invalid_argument("fourier_terms: 2K must be below the period (K=" + std::to_string(harmonics) + ")");
    }
    DesignMatrix dm;
    for (int j = 1; j <= harmonics; ++j) {
        dm.columns.push_back("fourier_sin" + std::to_string(j));
        dm.columns.push_back("fourier_cos" + std::to_string(j));
    }
    dm.x.resize(static_cast<Eigen::Index>(n), 2 * harmonics);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(first_t + i);
        for (int j = 1; j <= harmonics; ++j) {
            const double angle = 2.0 * std::numbers::pi * j * t / period;
            dm.x(static_cast<Eigen::Index>(i), 2 * (j - 1)) = std::sin(angle);
            dm.x(static_cast<Eigen::Index>(i), 2 * (j - 1) + 1) = std::cos(angle);
        }
        dm.time_index.push_back(first_t + i);
    }
    return dm;
}

std::string format_design_csv(const DesignMatrix &dm) {
    std::string out = "t";
    for (const auto &c : dm.columns) out += ',' + c;
    if (dm.has_target()) out += ",target";
    out += '\n';
    for (std::size_t i = 0; i < dm.rows(); ++i) {
        out += dm.time_index.empty() ? std::to_string(i) : std::to_string(dm.time_index[i]);
        for (Eigen::Index j = 0; j < dm.x.cols(); ++j) out += ',' + format_double(dm.x(static_cast<Eigen::Index>(i), j));
        if (dm.has_target()) out += ',' + format_double(dm.target(static_cast<Eigen::Index>(i)));
        out += '\n';
    }
    return out;
}

} // namespace tsa
} // namespace hdcast
