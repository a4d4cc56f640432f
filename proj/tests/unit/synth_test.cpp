#include "hdcast/indices.hpp"
#include "hdcast/synth.hpp"
#include "hdcast/tsa.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace hdcast;

TEST_CASE("triangular kernel") {
    const auto k = synth::triangular_kernel();
    CHECK(k.size() == 16);
    CHECK(k.begin()->first == 5);
    CHECK(k.rbegin()->first == 20);
    double sum = 0.0;
    for (auto [lag, w] : k) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    const auto peak = std::max_element(k.begin(), k.end(), [](auto a, auto b) { return a.second < b.second; });
    CHECK(peak->first == 10);
    CHECK(k.at(5) < k.at(9));
    CHECK(k.at(11) > k.at(20));
}

TEST_CASE("degenerate parameters give constant showings") {
    synth::SynthParams p;
    p.seasonal_amplitude = 0.0;
    p.trend_slope = 0.0;
    p.noise_sd = 0.0;
    p.shock_sd = 0.0;
    const auto w = synth::generate_weekly(p);
    for (const auto &r : w.weekly.records) CHECK(r.showings == std::lround(p.showings_base));
}

TEST_CASE("weekly corpus invariants") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        synth::SynthParams p;
        p.seed = seed;
        const auto w = synth::generate_weekly(p);
        CHECK(w.weekly.size() == 156);
        w.weekly.validate();
        CHECK(w.truth.trend.size() == 156);
        CHECK(w.truth.sold_expected.size() == 156);
        for (const auto &r : w.weekly.records) {
            CHECK(r.showings > 0);
            CHECK(r.sold >= 0);
            CHECK(r.sold <= r.on_market);
            CHECK(r.on_market > 0);
        }
        for (double v : indices::compute_indices(w.weekly).hdi()) {
            CHECK(v > 0.0);
            CHECK(v < 0.2);
        }
    }
}

TEST_CASE("showings follow the seasonal peak") {
    int ok = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        synth::SynthParams p;
        p.seed = seed;
        const auto d = tsa::seasonal_decompose(synth::generate_weekly(p).weekly.showings());
        const auto week = d.peak_position() + 1;
        ok += week >= 30 && week <= 38;
    }
    CHECK(ok >= 9);
}

TEST_CASE("events aggregate to the emitted weekly series") {
    for (std::uint64_t seed : {1u, 2u, 9u}) {
        synth::SynthParams p;
        p.seed = seed;
        p.n_weeks = 80;
        const auto out = synth::generate_events(p);
        CHECK(ingest::aggregate_weekly(out.events, out.calendar) == out.weekly);

        long showings = 0, sold = 0, other = 0;
        for (const auto &e : out.events) {
            if (e.kind == ingest::EventKind::showing) ++showings;
            else if (e.kind == ingest::EventKind::sold) ++sold;
            else if (e.kind == ingest::EventKind::listed || e.kind == ingest::EventKind::delisted) ++other;
        }
        long want_showings = 0, want_sold = 0;
        for (const auto &r : out.weekly.records) {
            want_showings += r.showings;
            want_sold += r.sold;
        }
        CHECK(showings == want_showings);
        CHECK(sold == want_sold);
        CHECK(static_cast<std::size_t>(showings + sold + other) == out.events.size());
        CHECK(std::is_sorted(out.events.begin(), out.events.end(),
                             [](const auto &a, const auto &b) { return a.date < b.date; }));
    }
}

TEST_CASE("weekly counts match between the two generators") {
    synth::SynthParams p;
    p.seed = 4;
    p.n_weeks = 60;
    const auto weekly = synth::generate_weekly(p).weekly;
    const auto events = synth::generate_events(p).weekly;
    REQUIRE(weekly.size() == events.size());
    for (std::size_t i = 0; i < weekly.size(); ++i) {
        CHECK(weekly.records[i].showings == events.records[i].showings);
        CHECK(weekly.records[i].sold == events.records[i].sold);
    }
}

TEST_CASE("same seed, same events") {
    synth::SynthParams p;
    p.seed = 3;
    p.n_weeks = 60;
    const auto a = synth::generate_events(p);
    const auto b = synth::generate_events(p);
    CHECK(ingest::format_events_csv(a.events) == ingest::format_events_csv(b.events));
    p.seed = 4;
    CHECK(ingest::format_events_csv(synth::generate_events(p).events) != ingest::format_events_csv(a.events));
}

TEST_CASE("parameter validation") {
    synth::SynthParams p;
    p.n_weeks = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    synth::SynthParams q;
    q.conversion_lags = {{5, 0.8}, {6, 0.8}};
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    synth::SynthParams r;
    r.seasonal_amplitude = 1.5;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}
