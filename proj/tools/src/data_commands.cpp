#include "commands.hpp"

#include "hdcast/indices.hpp"
#include "hdcast/synth.hpp"
#include "hdcast/tsa.hpp"

#include <algorithm>
#include <memory>
#include <ostream>
#include <sstream>

namespace hdcast::cli {

namespace {

ingest::WeekKey parse_week_key(const std::string &text) {
    const auto dash = text.find('-');
    try {
        if (dash == std::string::npos) throw std::invalid_argument("");
        ingest::WeekKey k{std::stoi(text.substr(0, dash)), std::stoi(text.substr(dash + 1))};
        if (k.week < 1 || k.week > 52) throw std::invalid_argument("");
        return k;
    } catch (const std::logic_error &) {
        throw std::invalid_argument("week must look like YEAR-WEEK with WEEK in 1..52, got '" + text + "'");
    }
}

Series pick_series(const ingest::WeeklySeries &weekly, const std::string &name) {
    if (name == "showings") return weekly.showings();
    if (name == "sold") return weekly.sold();
    if (name == "on_market") return weekly.on_market();
    if (name == "median_dom") return weekly.median_dom();
    const auto idx = indices::compute_indices(weekly);
    if (name == "hdi") return idx.hdi();
    if (name == "si") return idx.si();
    return idx.hdi_sqrt();
}

const std::vector<std::string> kSeriesNames{"showings", "sold", "on_market", "median_dom", "hdi", "si", "hdi_sqrt"};

void add_synth(CLI::App &app, Io io) {
    struct Opts {
        std::string out, params;
        std::uint64_t seed = 1;
        int weeks = 156;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("synth", "Generate a synthetic event corpus with known structure");
    sub->add_option("--out", o->out, "Output directory")->required();
    auto *seed = sub->add_option("--seed", o->seed, "Random seed")->capture_default_str();
    auto *weeks = sub->add_option("--weeks", o->weeks, "Number of weeks")->capture_default_str();
    sub->add_option("--params", o->params, "JSON file of generator parameters");
    sub->callback([o, sub, seed, weeks, io] {
        synth::SynthParams p;
        if (!o->params.empty()) p = artifacts::synth_params_from_json(load_json(o->params));
        if (seed->count() > 0 || o->params.empty()) p.seed = o->seed;
        if (weeks->count() > 0 || o->params.empty()) p.n_weeks = o->weeks;
        p.validate();
        const auto gen = synth::generate_events(p);
        const std::filesystem::path dir(o->out);
        std::filesystem::create_directories(dir);
        write_file_atomic(dir / "events.csv", ingest::format_events_csv(gen.events));
        write_file_atomic(dir / "weekly.csv", ingest::format_weekly_csv(gen.weekly));
        Json truth{{"params", artifacts::to_json(p)}, {"truth", artifacts::to_json(gen.truth)}};
        write_file_atomic(dir / "truth.json", artifacts::dump(truth));
        echo_config(dir, *sub);
        io.out << "wrote " << gen.events.size() << " events over " << gen.weekly.size() << " weeks to "
               << dir.string() << '\n';
    });
}

void add_aggregate(CLI::App &app, Io io) {
    struct Opts {
        std::string events, out, first, last;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("aggregate", "Filter property events and count them per week");
    sub->add_option("--events", o->events, "Event CSV")->required();
    sub->add_option("--out", o->out, "Weekly CSV (stdout if omitted)");
    sub->add_option("--first-week", o->first, "First week of the window, YEAR-WEEK");
    sub->add_option("--last-week", o->last, "Last week of the window, YEAR-WEEK");
    sub->callback([o, sub, io] {
        std::istringstream in(read_file(o->events));
        const auto events = ingest::filter_events(ingest::parse_events(in));
        if (events.empty()) throw DataError(o->events + ": no residential events to aggregate");
        const auto cover = ingest::WeekCalendar::covering(events);
        const ingest::WeekCalendar calendar(o->first.empty() ? cover.first() : parse_week_key(o->first),
                                            o->last.empty() ? cover.last() : parse_week_key(o->last));
        emit(o->out, ingest::format_weekly_csv(ingest::aggregate_weekly(events, calendar)), *sub, io);
    });
}

void add_indices(CLI::App &app, Io io) {
    struct Opts {
        std::string weekly, out;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("indices", "Compute the housing demand and showing indices");
    sub->add_option("--weekly", o->weekly, "Weekly CSV")->required();
    sub->add_option("--out", o->out, "Index CSV (stdout if omitted)");
    sub->callback([o, sub, io] {
        emit(o->out, indices::format_index_csv(indices::compute_indices(load_weekly(o->weekly))), *sub, io);
    });
}

void add_decompose(CLI::App &app, Io io) {
    struct Opts {
        std::string weekly, out, series = "hdi";
        std::size_t period = 52;
        int iterations = 2;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("decompose", "Split a weekly series into trend, seasonal and remainder");
    sub->add_option("--weekly", o->weekly, "Weekly CSV")->required();
    sub->add_option("--series", o->series, "Series to decompose")
        ->check(CLI::IsMember(kSeriesNames))
        ->capture_default_str();
    sub->add_option("--period", o->period, "Seasonal period in weeks")->check(CLI::Range(2, 520))->capture_default_str();
    sub->add_option("--iterations", o->iterations, "Trend/seasonal passes")->check(CLI::Range(1, 50))->capture_default_str();
    sub->add_option("--out", o->out, "Decomposition CSV (stdout if omitted)");
    sub->callback([o, sub, io] {
        const auto weekly = load_weekly(o->weekly);
        const auto dec = tsa::seasonal_decompose(pick_series(weekly, o->series), o->period, o->iterations);
        std::string csv = "t,observed,trend,seasonal,remainder\n";
        for (std::size_t i = 0; i < dec.observed.size(); ++i) {
            csv += std::to_string(i + 1) + ',' + format_double(dec.observed[i]) + ',' +
                   format_double(dec.trend[i]) + ',' + format_double(dec.seasonal[i]) + ',' +
                   format_double(dec.remainder[i]) + '\n';
        }
        emit(o->out, csv, *sub, io);
        if (!o->out.empty()) {
            io.out << "peak_position=" << dec.peak_position() + 1
                   << " seasonal_strength=" << format_significant(tsa::seasonal_strength(dec), 4) << '\n';
        }
    });
}

void add_xcorr(CLI::App &app, Io io) {
    struct Opts {
        std::string weekly, out, leading = "showings", lagging = "sold";
        int max_lag = 25;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("xcorr", "Cross-correlation of a leading and a lagging weekly series");
    sub->add_option("--weekly", o->weekly, "Weekly CSV")->required();
    sub->add_option("--x", o->leading, "Leading series")->check(CLI::IsMember(kSeriesNames))->capture_default_str();
    sub->add_option("--y", o->lagging, "Lagging series")->check(CLI::IsMember(kSeriesNames))->capture_default_str();
    sub->add_option("--max-lag", o->max_lag, "Largest lag in weeks")->check(CLI::Range(0, 520))->capture_default_str();
    sub->add_option("--out", o->out, "Cross-correlation CSV (stdout if omitted)");
    sub->callback([o, sub, io] {
        const auto weekly = load_weekly(o->weekly);
        const auto cc = tsa::cross_correlation(pick_series(weekly, o->leading), pick_series(weekly, o->lagging),
                                               o->max_lag);
        const double bound = tsa::ccf_significance_bound(weekly.size());
        std::string csv = "lag,correlation,significance_bound\n";
        for (const auto &c : cc) {
            csv += std::to_string(c.lag) + ',' + format_double(c.correlation) + ',' + format_double(bound) + '\n';
        }
        emit(o->out, csv, *sub, io);
        if (!o->out.empty()) {
            const auto best = std::max_element(cc.begin(), cc.end(), [](const auto &a, const auto &b) {
                return a.correlation < b.correlation;
            });
            io.out << "peak_lag=" << best->lag << " correlation=" << format_significant(best->correlation, 4) << '\n';
        }
    });
}

void add_design(CLI::App &app, Io io) {
    struct Opts {
        std::string weekly, out;
        LagOptions lags;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("design", "Assemble lagged predictors and the sqrt(HDI) target");
    sub->add_option("--weekly", o->weekly, "Weekly CSV")->required();
    o->lags.add_to(sub, "short");
    sub->add_option("--out", o->out, "Design CSV (stdout if omitted)");
    sub->callback([o, sub, io] {
        emit(o->out, tsa::format_design_csv(design_for(load_weekly(o->weekly), o->lags.spec())), *sub, io);
    });
}

} // namespace

void add_data_commands(CLI::App &app, Io io) {
    add_synth(app, io);
    add_aggregate(app, io);
    add_indices(app, io);
    add_decompose(app, io);
    add_xcorr(app, io);
    add_design(app, io);
}

} // namespace hdcast::cli
