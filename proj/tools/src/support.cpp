#include "support.hpp"

#include "hdcast/indices.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace hdcast::cli {

Json effective_config(const CLI::App &sub) {
    Json j;
    j["command"] = sub.get_name();
    for (const CLI::Option *opt : sub.get_options()) {
        const auto &names = opt->get_lnames();
        if (names.empty()) continue;
        const std::string &name = names.front();
        if (name == "help" || name == "config") continue;
        if (opt->get_expected_min() == 0) {
            j[name] = opt->count() > 0;
            continue;
        }
        const auto &results = opt->results();
        if (results.empty()) {
            j[name] = opt->get_default_str();
        } else if (opt->get_expected_max() > 1) {
            j[name] = results;
        } else {
            j[name] = results.back();
        }
    }
    return j;
}

void echo_config(const std::filesystem::path &target, const CLI::App &sub) {
    std::string base = target.string();
    while (base.size() > 1 && (base.back() == '/' || base.back() == '\\')) base.pop_back();
    write_file_atomic(base + ".config.json", artifacts::dump(effective_config(sub)));
}

void emit(const std::string &path, const std::string &content, const CLI::App &sub, Io io) {
    if (path.empty()) {
        io.out << content;
        return;
    }
    write_file_atomic(path, content);
    echo_config(path, sub);
}

ingest::WeeklySeries load_weekly(const std::string &path) {
    std::istringstream in(read_file(path));
    auto series = ingest::parse_weekly_csv(in);
    series.validate();
    return series;
}

Json load_json(const std::string &path) {
    try {
        return Json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error &e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
}

void LagOptions::add_to(CLI::App *sub, std::string default_preset) {
    preset = std::move(default_preset);
    sub->add_option("--lags", preset, "Predictor preset: short, lasso35 or arimax")
        ->check(CLI::IsMember({"short", "lasso35", "arimax"}))
        ->capture_default_str();
    sub->add_option("--si-lags", si, "Explicit SI lags, e.g. 0,5-20 (replaces the preset)");
    sub->add_option("--hdi-lags", hdi, "Explicit HDI lags (replaces the preset)");
    sub->add_flag("--median-dom", median_dom, "With explicit lags: include median days on market");
    sub->add_flag("--week", week, "With explicit lags: include week of year");
}

tsa::LagSpec LagOptions::spec() const {
    if (si.empty() && hdi.empty() && !median_dom && !week) return tsa::LagSpec::preset(preset);
    tsa::LagSpec s;
    if (!si.empty()) s.si_lags = tsa::parse_lag_list(si);
    if (!hdi.empty()) s.hdi_lags = tsa::parse_lag_list(hdi);
    s.include_median_dom = median_dom;
    s.include_week = week;
    return s;
}

std::string format_lags(const std::set<int> &lags) {
    std::string out;
    auto it = lags.begin();
    while (it != lags.end()) {
        const int lo = *it;
        int hi = lo;
        auto next = std::next(it);
        while (next != lags.end() && *next == hi + 1) {
            hi = *next;
            ++next;
        }
        if (!out.empty()) out += ',';
        out += hi > lo ? std::to_string(lo) + "-" + std::to_string(hi) : std::to_string(lo);
        it = next;
    }
    return out;
}

Json lag_json(const tsa::LagSpec &spec) {
    return Json{{"si_lags", format_lags(spec.si_lags)},
                {"hdi_lags", format_lags(spec.hdi_lags)},
                {"median_dom", spec.include_median_dom},
                {"week", spec.include_week}};
}

tsa::LagSpec lag_from_json(const Json &j) {
    try {
        tsa::LagSpec s;
        const auto si = j.at("si_lags").get<std::string>();
        const auto hdi = j.at("hdi_lags").get<std::string>();
        if (!si.empty()) s.si_lags = tsa::parse_lag_list(si);
        if (!hdi.empty()) s.hdi_lags = tsa::parse_lag_list(hdi);
        s.include_median_dom = j.at("median_dom").get<bool>();
        s.include_week = j.at("week").get<bool>();
        return s;
    } catch (const nlohmann::json::exception &e) {
        throw DataError(std::string("model artifact has a malformed design block: ") + e.what());
    }
}

DesignMatrix design_for(const ingest::WeeklySeries &weekly, const tsa::LagSpec &lags) {
    return tsa::build_design_matrix(indices::compute_indices(weekly), weekly, lags);
}

} // namespace hdcast::cli
