#pragma once

#include "hdcast/common.hpp"

#include <chrono>
#include <compare>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hdcast::ingest {

enum class EventKind { showing, inspection, open_house, listed, delisted, sold, other };
enum class PropertyClass { residential, rental, retail, bundle };

std::string_view to_string(EventKind kind);
std::string_view to_string(PropertyClass cls);
EventKind parse_event_kind(std::string_view text);

struct PropertyEvent {
    std::string listing_id;
    EventKind kind = EventKind::other;
    std::chrono::year_month_day date{};
    PropertyClass property_class = PropertyClass::residential;
    std::optional<int> days_on_market;

    bool operator==(const PropertyEvent &) const = default;
};

std::optional<std::chrono::year_month_day> parse_iso_date(std::string_view text);
std::string format_iso_date(std::chrono::year_month_day date);

/// (year, week-of-year) with weeks 1..52. Week 1 starts on January 1 and weeks
/// advance in 7-day blocks; the trailing day or two of a year fold into week 52.
struct WeekKey {
    int year = 0;
    int week = 1;

    auto operator<=>(const WeekKey &) const = default;

    /// Monotone ordinal; consecutive weeks differ by exactly 1 across year ends.
    long ordinal() const { return static_cast<long>(year) * 52 + (week - 1); }
    static WeekKey from_ordinal(long ordinal);
    WeekKey next() const { return from_ordinal(ordinal() + 1); }
};

WeekKey week_of(std::chrono::year_month_day date);
/// Inclusive range of calendar days that belong to `key`.
std::pair<std::chrono::sys_days, std::chrono::sys_days> days_of(WeekKey key);

/// Contiguous inclusive range of weeks that defines the corpus window.
class WeekCalendar {
public:
    WeekCalendar(WeekKey first, WeekKey last);

    /// Smallest calendar containing every event date.
    static WeekCalendar covering(std::span<const PropertyEvent> events);

    WeekKey first() const { return first_; }
    WeekKey last() const { return last_; }
    std::size_t size() const { return static_cast<std::size_t>(last_.ordinal() - first_.ordinal() + 1); }
    std::optional<std::size_t> index_of(WeekKey key) const;
    WeekKey at(std::size_t index) const { return WeekKey::from_ordinal(first_.ordinal() + static_cast<long>(index)); }

private:
    WeekKey first_;
    WeekKey last_;
};

struct WeeklyRecord {
    int year = 0;
    int week = 1;
    long showings = 0;
    long sold = 0;
    long on_market = 0;
    double median_dom = 0.0;
    double mean_dom = 0.0;
    bool dom_missing = true;

    bool operator==(const WeeklyRecord &) const = default;
};

struct WeeklySeries {
    std::vector<WeeklyRecord> records;

    std::size_t size() const { return records.size(); }
    bool operator==(const WeeklySeries &) const = default;

    /// Throws DataError unless weeks are consecutive, non-empty and sold <= on_market.
    void validate() const;

    Series showings() const;
    Series sold() const;
    Series on_market() const;
    Series median_dom() const;
    /// First `n` weeks (n <= size()).
    WeeklySeries head(std::size_t n) const;
};

/// Reads the event CSV (`listing_id,event_kind,date,property_class,days_on_market`).
std::vector<PropertyEvent> parse_events(std::istream &source);
std::string format_events_csv(std::span<const PropertyEvent> events);

/// Keeps residential showing/listed/delisted/sold events.
std::vector<PropertyEvent> filter_events(std::span<const PropertyEvent> events);

WeeklySeries aggregate_weekly(std::span<const PropertyEvent> events, const WeekCalendar &calendar);

inline constexpr std::string_view kEventHeader = "listing_id,event_kind,date,property_class,days_on_market";
inline constexpr std::string_view kWeeklyHeader = "year,week,showings,sold,on_market,median_dom,mean_dom,dom_missing";

std::string format_weekly_csv(const WeeklySeries &series);
WeeklySeries parse_weekly_csv(std::istream &source);

} // namespace hdcast::ingest
