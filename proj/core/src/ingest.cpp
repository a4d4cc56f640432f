#include "hdcast/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>

namespace hdcast::ingest {

namespace chr = std::chrono;

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::showing: return "showing";
    case EventKind::inspection: return "inspection";
    case EventKind::open_house: return "open_house";
    case EventKind::listed: return "listed";
    case EventKind::delisted: return "delisted";
    case EventKind::sold: return "sold";
    case EventKind::other: return "other";
    }
    return "other";
}

std::string_view to_string(PropertyClass cls) {
    switch (cls) {
    case PropertyClass::residential: return "residential";
    case PropertyClass::rental: return "rental";
    case PropertyClass::retail: return "retail";
    case PropertyClass::bundle: return "bundle";
    }
    return "residential";
}

EventKind parse_event_kind(std::string_view text) {
    for (auto kind : {EventKind::showing, EventKind::inspection, EventKind::open_house, EventKind::listed,
                      EventKind::delisted, EventKind::sold}) {
        if (text == to_string(kind)) return kind;
    }
    return EventKind::other;
}

namespace {

std::optional<PropertyClass> parse_property_class(std::string_view text) {
    for (auto cls : {PropertyClass::residential, PropertyClass::rental, PropertyClass::retail, PropertyClass::bundle}) {
        if (text == to_string(cls)) return cls;
    }
    return std::nullopt;
}

template <class Int> std::optional<Int> parse_int(std::string_view text) {
    Int value{};
    if (text.empty()) return std::nullopt;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
    return value;
}

std::optional<double> parse_real(std::string_view text) {
    double value{};
    if (text.empty()) return std::nullopt;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
    return value;
}

// Order used to replay a listing's history: a listing opens before it is
// shown, sold or withdrawn on the same day.
int replay_rank(EventKind kind) {
    switch (kind) {
    case EventKind::listed: return 0;
    case EventKind::showing: return 1;
    case EventKind::sold: return 2;
    case EventKind::delisted: return 3;
    default: return 4;
    }
}

double median_of(std::vector<int> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (static_cast<double>(values[n / 2 - 1]) + values[n / 2]);
}

} // namespace

std::optional<chr::year_month_day> parse_iso_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto y = parse_int<int>(text.substr(0, 4));
    auto m = parse_int<unsigned>(text.substr(5, 2));
    auto d = parse_int<unsigned>(text.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    chr::year_month_day ymd{chr::year{*y}, chr::month{*m}, chr::day{*d}};
    if (!ymd.ok()) return std::nullopt;
    return ymd;
}

std::string format_iso_date(chr::year_month_day date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

WeekKey WeekKey::from_ordinal(long ordinal) {
    long year = ordinal / 52;
    long rem = ordinal % 52;
    if (rem < 0) {
        rem += 52;
        --year;
    }
    return WeekKey{static_cast<int>(year), static_cast<int>(rem) + 1};
}

WeekKey week_of(chr::year_month_day date) {
    const chr::sys_days jan1{date.year() / chr::January / 1};
    const auto day_of_year = (chr::sys_days{date} - jan1).count();
    const int week = std::min<int>(static_cast<int>(day_of_year / 7) + 1, 52);
    return WeekKey{static_cast<int>(date.year()), week};
}

std::pair<chr::sys_days, chr::sys_days> days_of(WeekKey key) {
    const chr::sys_days jan1{chr::year{key.year} / chr::January / 1};
    const chr::sys_days start = jan1 + chr::days{7 * (key.week - 1)};
    if (key.week < 52) return {start, start + chr::days{6}};
    return {start, chr::sys_days{chr::year{key.year} / chr::December / 31}};
}

WeekCalendar::WeekCalendar(WeekKey first, WeekKey last) : first_(first), last_(last) {
    if (first.week < 1 || first.week > 52 || last.week < 1 || last.week > 52) {
        throw std::invalid_argument("WeekCalendar: week outside 1..52");
    }
    if (last < first) throw std::invalid_argument("WeekCalendar: last week precedes first week");
}

WeekCalendar WeekCalendar::covering(std::span<const PropertyEvent> events) {
    if (events.empty()) throw DataError("cannot derive a calendar from an empty event list");
    auto lo = week_of(events.front().date);
    auto hi = lo;
    for (const auto &e : events) {
        const auto w = week_of(e.date);
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    return WeekCalendar(lo, hi);
}

std::optional<std::size_t> WeekCalendar::index_of(WeekKey key) const {
    if (key < first_ || last_ < key) return std::nullopt;
    return static_cast<std::size_t>(key.ordinal() - first_.ordinal());
}

void WeeklySeries::validate() const {
    if (records.empty()) throw DataError("weekly series is empty");
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto &r = records[i];
        const std::string label = std::to_string(r.year) + " week " + std::to_string(r.week);
        if (r.week < 1 || r.week > 52) throw DataError("week out of range at " + label);
        if (r.showings < 0 || r.sold < 0 || r.on_market < 0) throw DataError("negative count at " + label);
        if (r.sold > r.on_market) throw DataError("sold exceeds on_market at " + label);
        if (i > 0) {
            const WeekKey prev{records[i - 1].year, records[i - 1].week};
            if (prev.next() != WeekKey{r.year, r.week}) throw DataError("weeks not consecutive at " + label);
        }
    }
}

namespace {
template <class F> Series column(const std::vector<WeeklyRecord> &rows, F get) {
    Series out;
    out.reserve(rows.size());
    for (const auto &r : rows) out.push_back(static_cast<double>(get(r)));
    return out;
}
} // namespace

Series WeeklySeries::showings() const { return column(records, [](const auto &r) { return r.showings; }); }
Series WeeklySeries::sold() const { return column(records, [](const auto &r) { return r.sold; }); }
Series WeeklySeries::on_market() const { return column(records, [](const auto &r) { return r.on_market; }); }
Series WeeklySeries::median_dom() const { return column(records, [](const auto &r) { return r.median_dom; }); }

WeeklySeries WeeklySeries::head(std::size_t n) const {
    if (n > records.size()) throw std::invalid_argument("WeeklySeries::head: n exceeds length");
    return WeeklySeries{{records.begin(), records.begin() + static_cast<std::ptrdiff_t>(n)}};
}

std::vector<PropertyEvent> parse_events(std::istream &source) {
    std::string line;
    std::size_t row = 1;
    if (!std::getline(source, line) || trim_line_ending(line) != kEventHeader) {
        throw ParseError(1, "header", "expected '" + std::string(kEventHeader) + "'");
    }
    std::vector<PropertyEvent> events;
    while (std::getline(source, line)) {
        ++row;
        const auto text = trim_line_ending(line);
        if (text.empty()) continue;
        const auto fields = split_csv_line(text);
        if (fields.size() != 5) {
            throw ParseError(row, "row", "expected 5 fields, found " + std::to_string(fields.size()));
        }
        PropertyEvent ev;
        if (fields[0].empty()) throw ParseError(row, "listing_id", "empty listing id");
        ev.listing_id = std::string(fields[0]);
        ev.kind = parse_event_kind(fields[1]);
        auto date = parse_iso_date(fields[2]);
        if (!date) throw ParseError(row, "date", "invalid ISO date '" + std::string(fields[2]) + "'");
        ev.date = *date;
        auto cls = parse_property_class(fields[3]);
        if (!cls) throw ParseError(row, "property_class", "unknown class '" + std::string(fields[3]) + "'");
        ev.property_class = *cls;
        if (!fields[4].empty()) {
            auto dom = parse_int<int>(fields[4]);
            if (!dom || *dom < 0) throw ParseError(row, "days_on_market", "not a non-negative integer");
            if (ev.kind != EventKind::sold) throw ParseError(row, "days_on_market", "only allowed on sold events");
            ev.days_on_market = *dom;
        } else if (ev.kind == EventKind::sold) {
            throw ParseError(row, "days_on_market", "required on sold events");
        }
        events.push_back(std::move(ev));
    }
    return events;
}

std::string format_events_csv(std::span<const PropertyEvent> events) {
    std::string out(kEventHeader);
    out += '\n';
    for (const auto &e : events) {
        out += e.listing_id;
        out += ',';
        out += to_string(e.kind);
        out += ',';
        out += format_iso_date(e.date);
        out += ',';
        out += to_string(e.property_class);
        out += ',';
        if (e.days_on_market) out += std::to_string(*e.days_on_market);
        out += '\n';
    }
    return out;
}

std::vector<PropertyEvent> filter_events(std::span<const PropertyEvent> events) {
    std::vector<PropertyEvent> kept;
    for (const auto &e : events) {
        if (e.property_class != PropertyClass::residential) continue;
        switch (e.kind) {
        case EventKind::showing:
        case EventKind::listed:
        case EventKind::delisted:
        case EventKind::sold: kept.push_back(e); break;
        default: break;
        }
    }
    return kept;
}

WeeklySeries aggregate_weekly(std::span<const PropertyEvent> events, const WeekCalendar &calendar) {
    const std::size_t n_weeks = calendar.size();
    std::vector<long> showings(n_weeks, 0), sold(n_weeks, 0);
    std::vector<std::vector<int>> doms(n_weeks);

    struct Step {
        chr::sys_days day;
        int rank;
        std::size_t week;
    };
    std::map<std::string, std::vector<Step>> histories;

    for (const auto &e : events) {
        const auto week = calendar.index_of(week_of(e.date));
        if (!week) throw DataError("event on " + format_iso_date(e.date) + " falls outside the calendar");
        switch (e.kind) {
        case EventKind::showing: ++showings[*week]; break;
        case EventKind::sold:
            if (!e.days_on_market) {
                throw DataError("sold event for " + e.listing_id + " lacks days_on_market");
            }
            ++sold[*week];
            doms[*week].push_back(*e.days_on_market);
            break;
        default: break;
        }
        if (e.kind == EventKind::listed || e.kind == EventKind::delisted || e.kind == EventKind::sold) {
            histories[e.listing_id].push_back({chr::sys_days{e.date}, replay_rank(e.kind), *week});
        }
    }

    // Stock of active listings: difference array over merged per-listing intervals
    // so a listing counts at most once per week.
    std::vector<long> delta(n_weeks + 1, 0);
    for (auto &[id, steps] : histories) {
        std::sort(steps.begin(), steps.end(), [](const Step &a, const Step &b) {
            return a.day != b.day ? a.day < b.day : a.rank < b.rank;
        });
        std::vector<std::pair<std::size_t, std::size_t>> intervals;
        std::optional<std::size_t> open;
        for (const auto &s : steps) {
            if (s.rank == 0) {
                if (!open) open = s.week;
            } else if (open) {
                intervals.emplace_back(*open, s.week);
                open.reset();
            }
        }
        if (open) intervals.emplace_back(*open, n_weeks - 1);
        std::optional<std::pair<std::size_t, std::size_t>> current;
        for (const auto &iv : intervals) {
            if (current && iv.first <= current->second) {
                current->second = std::max(current->second, iv.second);
                continue;
            }
            if (current) {
                ++delta[current->first];
                --delta[current->second + 1];
            }
            current = iv;
        }
        if (current) {
            ++delta[current->first];
            --delta[current->second + 1];
        }
    }

    WeeklySeries series;
    series.records.reserve(n_weeks);
    long active = 0;
    for (std::size_t w = 0; w < n_weeks; ++w) {
        active += delta[w];
        const auto key = calendar.at(w);
        WeeklyRecord rec{key.year, key.week, showings[w], sold[w], active, 0.0, 0.0, true};
        if (!doms[w].empty()) {
            rec.median_dom = median_of(doms[w]);
            const double total = std::accumulate(doms[w].begin(), doms[w].end(), 0.0);
            rec.mean_dom = total / static_cast<double>(doms[w].size());
            rec.dom_missing = false;
        }
        if (rec.sold > rec.on_market) {
            throw DataError("sold (" + std::to_string(rec.sold) + ") exceeds on_market (" +
                            std::to_string(rec.on_market) + ") in " + std::to_string(key.year) + " week " +
                            std::to_string(key.week));
        }
        series.records.push_back(rec);
    }
    return series;
}

std::string format_weekly_csv(const WeeklySeries &series) {
    std::string out(kWeeklyHeader);
    out += '\n';
    for (const auto &r : series.records) {
        out += std::to_string(r.year) + ',' + std::to_string(r.week) + ',' + std::to_string(r.showings) + ',' +
               std::to_string(r.sold) + ',' + std::to_string(r.on_market) + ',' + format_double(r.median_dom) + ',' +
               format_double(r.mean_dom) + ',' + (r.dom_missing ? "1" : "0") + '\n';
    }
    return out;
}

WeeklySeries parse_weekly_csv(std::istream &source) {
    std::string line;
    std::size_t row = 1;
    if (!std::getline(source, line) || trim_line_ending(line) != kWeeklyHeader) {
        throw ParseError(1, "header", "expected '" + std::string(kWeeklyHeader) + "'");
    }
    WeeklySeries series;
    static constexpr std::string_view names[] = {"year", "week", "showings", "sold",
                                                 "on_market", "median_dom", "mean_dom", "dom_missing"};
    while (std::getline(source, line)) {
        ++row;
        const auto text = trim_line_ending(line);
        if (text.empty()) continue;
        const auto f = split_csv_line(text);
        if (f.size() != 8) throw ParseError(row, "row", "expected 8 fields, found " + std::to_string(f.size()));
        auto as_int = [&](std::size_t i) {
            auto v = parse_int<long>(f[i]);
            if (!v || *v < 0) throw ParseError(row, std::string(names[i]), "not a non-negative integer");
            return *v;
        };
        auto as_real = [&](std::size_t i) {
            auto v = parse_real(f[i]);
            if (!v || *v < 0) throw ParseError(row, std::string(names[i]), "not a non-negative number");
            return *v;
        };
        WeeklyRecord r;
        r.year = static_cast<int>(as_int(0));
        r.week = static_cast<int>(as_int(1));
        r.showings = as_int(2);
        r.sold = as_int(3);
        r.on_market = as_int(4);
        r.median_dom = as_real(5);
        r.mean_dom = as_real(6);
        if (f[7] != "0" && f[7] != "1") throw ParseError(row, "dom_missing", "expected 0 or 1");
        r.dom_missing = f[7] == "1";
        series.records.push_back(r);
    }
    series.validate();
    return series;
}

} // namespace hdcast::ingest
