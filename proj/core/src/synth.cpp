#include "hdcast/synth.hpp"

#include "hdcast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace hdcast::synth {

namespace chr = std::chrono;

std::map<int, double> triangular_kernel(int lo, int peak, int hi) {
    if (!(lo <= peak && peak <= hi && lo >= 0)) throw std::invalid_argument("triangular_kernel: need 0 <= lo <= peak <= hi");
    std::map<int, double> w;
    double total = 0.0;
    for (int l = lo; l <= hi; ++l) {
        const double v = l <= peak ? static_cast<double>(l - lo + 1) / (peak - lo + 1)
                                   : static_cast<double>(hi + 1 - l) / (hi + 1 - peak);
        w[l] = v;
        total += v;
    }
    for (auto &[l, v] : w) v /= total;
    return w;
}

void SynthParams::validate() const {
    auto require = [](bool ok, const char *what) {
        if (!ok) throw std::invalid_argument(std::string("synth parameters: ") + what);
    };
    require(n_weeks >= 1, "n_weeks must be positive");
    require(showings_base > 0.0, "showings_base must be positive");
    require(on_market_base > 0.0, "on_market_base must be positive");
    require(conversion > 0.0, "conversion must be positive");
    require(seasonal_amplitude >= 0.0 && seasonal_amplitude < 1.0, "seasonal_amplitude must be in [0, 1)");
    require(noise_sd >= 0.0 && sold_noise_sd >= 0.0 && on_market_sd >= 0.0 && shock_sd >= 0.0,
            "noise levels must be non-negative");
    require(std::abs(shock_phi) < 1.0 && std::abs(on_market_phi) < 1.0, "AR coefficients must be in (-1, 1)");
    require(delist_rate >= 0.0 && delist_rate < 1.0, "delist_rate must be in [0, 1)");
    require(burn_in >= 0, "burn_in must be non-negative");
    require(!conversion_lags.empty(), "conversion_lags must not be empty");
    double total = 0.0;
    for (const auto &[lag, w] : conversion_lags) {
        require(lag >= 0, "conversion lags must be non-negative");
        require(w >= 0.0, "conversion weights must be non-negative");
        total += w;
    }
    require(total <= 1.0 + 1e-12, "conversion weights must sum to at most 1");
    require(conversion_lags.rbegin()->first <= burn_in, "burn_in must cover the longest conversion lag");
    require(1.0 + trend_slope * n_weeks > 0.0, "trend would turn negative");
}

ingest::WeekCalendar corpus_calendar(const SynthParams &params) {
    const ingest::WeekKey first{params.start_year, 1};
    return {first, ingest::WeekKey::from_ordinal(first.ordinal() + params.n_weeks - 1)};
}

namespace {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Counts {
    std::vector<long> showings, sold, on_market_target;
    Truth truth;
};

Counts simulate_counts(const SynthParams &p) {
    Rng rng(stream_seed(p.seed, 0));
    const int total = p.n_weeks + p.burn_in;
    Counts c;
    std::vector<long> showings(static_cast<std::size_t>(total));
    std::vector<double> trend(showings.size()), seasonal(showings.size()), noise(showings.size());
    double shock = 0.0;
    for (int i = 0; i < total; ++i) {
        const double t = i - p.burn_in + 1; // emitted weeks are t = 1..n_weeks
        const auto k = static_cast<std::size_t>(i);
        trend[k] = 1.0 + p.trend_slope * t;
        seasonal[k] = 1.0 + p.seasonal_amplitude * std::cos(2.0 * std::numbers::pi * (t - p.peak_week) / 52.0);
        shock = p.shock_phi * shock + p.shock_sd * rng.normal();
        noise[k] = std::exp(shock + p.noise_sd * rng.normal());
        showings[k] = std::max(0L, std::lround(p.showings_base * trend[k] * seasonal[k] * noise[k]));
    }
    double z = 0.0;
    for (int i = p.burn_in; i < total; ++i) {
        const auto k = static_cast<std::size_t>(i);
        double expected = 0.0;
        for (const auto &[lag, w] : p.conversion_lags) {
            expected += w * p.conversion * static_cast<double>(showings[k - static_cast<std::size_t>(lag)]);
        }
        const double sn = std::exp(p.sold_noise_sd * rng.normal());
        z = std::clamp(p.on_market_phi * z + p.on_market_sd * rng.normal(), -0.5, 0.5);
        const long om = std::max(1L, std::lround(p.on_market_base * std::exp(z)));
        c.showings.push_back(showings[k]);
        c.sold.push_back(std::max(0L, std::lround(expected * sn)));
        c.on_market_target.push_back(om);
        c.truth.trend.push_back(trend[k]);
        c.truth.seasonal.push_back(seasonal[k]);
        c.truth.showings_noise.push_back(noise[k]);
        c.truth.showings_mean.push_back(p.showings_base * trend[k] * seasonal[k]);
        c.truth.sold_expected.push_back(expected);
        c.truth.sold_noise.push_back(sn);
        c.truth.on_market_target.push_back(static_cast<double>(om));
    }
    return c;
}

struct Listing {
    std::size_t id;
    chr::sys_days listed;
};

chr::sys_days random_day(Rng &rng, chr::sys_days lo, chr::sys_days hi) {
    const auto span = static_cast<std::uint64_t>((hi - lo).count() + 1);
    return lo + chr::days(static_cast<int>(rng.index(span)));
}

std::string listing_name(std::size_t id) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "L%07zu", id);
    return buf;
}

double median_of(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Runs the listing stock week by week. The returned weekly series is the
// generator's own bookkeeping; events are produced only when requested.
ingest::WeeklySeries simulate_market(const SynthParams &p, const Counts &c,
                                     std::vector<ingest::PropertyEvent> *events) {
    Rng stock_rng(stream_seed(p.seed, 1));
    Rng show_rng(stream_seed(p.seed, 2));
    const auto calendar = corpus_calendar(p);
    std::vector<Listing> active;
    std::size_t next_id = 1;
    ingest::WeeklySeries series;
    const auto n = static_cast<std::size_t>(p.n_weeks);
    for (std::size_t t = 0; t < n; ++t) {
        const auto key = calendar.at(t);
        const auto [first_day, last_day] = ingest::days_of(key);
        const long target = c.on_market_target[t];
        const long carry = static_cast<long>(active.size());
        for (long k = carry; k < target; ++k) {
            Listing l{next_id++, random_day(stock_rng, first_day, last_day)};
            if (events) {
                events->push_back({listing_name(l.id), ingest::EventKind::listed, chr::year_month_day{l.listed},
                                   ingest::PropertyClass::residential, std::nullopt});
            }
            active.push_back(l);
        }
        const long on_market = static_cast<long>(active.size());
        const long sold = std::min(c.sold[t], on_market);

        if (events) {
            for (long k = 0; k < c.showings[t]; ++k) {
                const auto &l = active[show_rng.index(active.size())];
                events->push_back({listing_name(l.id), ingest::EventKind::showing,
                                   chr::year_month_day{random_day(show_rng, std::max(first_day, l.listed), last_day)},
                                   ingest::PropertyClass::residential, std::nullopt});
            }
        }

        // Exits: sales first, then withdrawals so next week's carry stays at or below its target.
        const long next_target = t + 1 < n ? c.on_market_target[t + 1] : target;
        const long remaining = on_market - sold;
        const long delisted = std::min(
            remaining, std::max(std::lround(p.delist_rate * static_cast<double>(on_market)), remaining - next_target));
        std::vector<int> doms;
        for (long k = 0; k < sold + delisted; ++k) {
            const std::size_t pick = stock_rng.index(active.size());
            const Listing l = active[pick];
            active[pick] = active.back();
            active.pop_back();
            const auto day = random_day(stock_rng, std::max(first_day, l.listed), last_day);
            const bool is_sale = k < sold;
            const int dom = static_cast<int>((day - l.listed).count());
            if (is_sale) doms.push_back(dom);
            if (events) {
                events->push_back({listing_name(l.id), is_sale ? ingest::EventKind::sold : ingest::EventKind::delisted,
                                   chr::year_month_day{day}, ingest::PropertyClass::residential,
                                   is_sale ? std::optional<int>(dom) : std::nullopt});
            }
        }
        ingest::WeeklyRecord rec{key.year, key.week, c.showings[t], sold, on_market, 0.0, 0.0, true};
        if (!doms.empty()) {
            rec.median_dom = median_of(doms);
            double total = 0.0;
            for (int d : doms) total += d;
            rec.mean_dom = total / static_cast<double>(doms.size());
            rec.dom_missing = false;
        }
        series.records.push_back(rec);
    }
    if (events) {
        std::stable_sort(events->begin(), events->end(), [](const auto &a, const auto &b) {
            return chr::sys_days{a.date} < chr::sys_days{b.date};
        });
    }
    return series;
}

} // namespace

WeeklyOutput generate_weekly(const SynthParams &params) {
    params.validate();
    Counts c = simulate_counts(params);
    WeeklyOutput out;
    out.weekly = simulate_market(params, c, nullptr);
    out.truth = std::move(c.truth);
    return out;
}

EventOutput generate_events(const SynthParams &params) {
    params.validate();
    Counts c = simulate_counts(params);
    EventOutput out;
    out.weekly = simulate_market(params, c, &out.events);
    out.truth = std::move(c.truth);
    out.calendar = corpus_calendar(params);
    return out;
}

} // namespace hdcast::synth
