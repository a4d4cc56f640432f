#pragma once

#include "hdcast/artifacts.hpp"
#include "hdcast/design.hpp"
#include "hdcast/ingest.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace hdcast::cli {

using artifacts::Json;

struct Io {
    std::ostream &out;
    std::ostream &err;
};

/// Every option of `sub` with its effective value (flag, file or default).
Json effective_config(const CLI::App &sub);

/// Writes `content` atomically to `path` and echoes the effective config to
/// `<path>.config.json`; an empty path means the output stream.
void emit(const std::string &path, const std::string &content, const CLI::App &sub, Io io);
void echo_config(const std::filesystem::path &target, const CLI::App &sub);

ingest::WeeklySeries load_weekly(const std::string &path);
Json load_json(const std::string &path);

/// --lags preset plus optional explicit lag lists.
struct LagOptions {
    std::string preset;
    std::string si;
    std::string hdi;
    bool median_dom = false;
    bool week = false;

    void add_to(CLI::App *sub, std::string default_preset);
    tsa::LagSpec spec() const;
};

Json lag_json(const tsa::LagSpec &spec);
tsa::LagSpec lag_from_json(const Json &j);

/// Builds the design matrix for `weekly` after computing indices.
DesignMatrix design_for(const ingest::WeeklySeries &weekly, const tsa::LagSpec &lags);

/// Text form of a lag set, e.g. "5-20" or "0,5-20".
std::string format_lags(const std::set<int> &lags);

} // namespace hdcast::cli
