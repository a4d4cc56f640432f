#pragma once

#include "hdcast/ingest.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace hdcast::synth {

/// Triangular weights on lags lo..hi peaking at `peak`, normalised to sum 1.
std::map<int, double> triangular_kernel(int lo = 5, int peak = 10, int hi = 20);

struct SynthParams {
    std::uint64_t seed = 1;
    int n_weeks = 156;
    int start_year = 2011;
    double showings_base = 1500.0;
    double trend_slope = 0.0059;     // relative growth per week
    double seasonal_amplitude = 0.374;
    int peak_week = 34;
    std::map<int, double> conversion_lags = triangular_kernel();
    double conversion = 0.07;        // share of lagged showings that become sales
    double noise_sd = 0.106;         // showings log-noise
    double shock_phi = 0.46;         // AR(1) persistence of showings demand shocks
    double shock_sd = 0.108;
    double sold_noise_sd = 0.069;
    double on_market_base = 2000.0;
    double on_market_sd = 0.02;      // log random-walk innovation
    double on_market_phi = 0.95;     // mean reversion of the log random walk
    double delist_rate = 0.01;       // weekly share of active listings withdrawn
    int burn_in = 20;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

/// Component series behind a generated corpus, one value per emitted week.
struct Truth {
    Series trend;          // 1 + slope * t
    Series seasonal;       // 1 + amplitude * cos(2 pi (t - peak) / 52)
    Series showings_noise; // multiplicative
    Series showings_mean;  // base * trend * seasonal
    Series sold_expected;  // sum_L weight_L * conversion * showings_{t-L}
    Series sold_noise;     // multiplicative
    Series on_market_target;
};

struct WeeklyOutput {
    ingest::WeeklySeries weekly;
    Truth truth;
};

struct EventOutput {
    std::vector<ingest::PropertyEvent> events; // chronological
    ingest::WeeklySeries weekly;               // what the events aggregate to
    Truth truth;
    ingest::WeekCalendar calendar{ingest::WeekKey{}, ingest::WeekKey{}};
};

WeeklyOutput generate_weekly(const SynthParams &params);
EventOutput generate_events(const SynthParams &params);

ingest::WeekCalendar corpus_calendar(const SynthParams &params);

} // namespace hdcast::synth
