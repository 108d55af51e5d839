#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace newsjump {

inline constexpr std::int64_t kMsPerSecond = 1000;
inline constexpr std::int64_t kMsPerMinute = 60 * kMsPerSecond;
inline constexpr std::int64_t kMsPerHour = 60 * kMsPerMinute;
inline constexpr std::int64_t kMsPerDay = 24 * kMsPerHour;

/// Calendar date as a day count since 1970-01-01.
struct Date {
    std::int32_t days = 0;

    static Date from_ymd(int year, unsigned month, unsigned day);
    /// Parses YYYY-MM-DD.
    static Date parse(std::string_view text);

    int year() const;
    unsigned month() const;
    unsigned day() const;
    /// 0 = Sunday ... 6 = Saturday.
    unsigned weekday() const;
    std::string to_string() const;

    Date operator+(int n) const { return Date{days + n}; }
    auto operator<=>(const Date&) const = default;
};

/// Instant on the venue-local wall clock, millisecond resolution.
///
/// All session logic runs on venue-local time; inputs carrying an explicit
/// UTC offset are shifted to venue-local time when parsed.
struct Timestamp {
    std::int64_t ms = 0;

    static Timestamp at(Date d, std::int64_t ms_of_day) { return {d.days * kMsPerDay + ms_of_day}; }

    Date date() const;
    std::int64_t ms_of_day() const;
    /// Fraction of the calendar day elapsed, in [0, 1).
    double day_fraction() const { return static_cast<double>(ms_of_day()) / kMsPerDay; }

    Timestamp operator+(std::int64_t d) const { return {ms + d}; }
    Timestamp operator-(std::int64_t d) const { return {ms - d}; }
    std::int64_t operator-(Timestamp o) const { return ms - o.ms; }
    auto operator<=>(const Timestamp&) const = default;
};

/// Parses "HH:MM" or "HH:MM:SS" into milliseconds after midnight.
std::int64_t parse_clock(std::string_view text);
std::string format_clock(std::int64_t ms_of_day);

/// Parses an ISO-8601 date-time: "YYYY-MM-DD[T| ]HH:MM[:SS[.fff]][Z|±HH[:MM]]".
///
/// Without an offset the value is taken as venue-local. With one, it is
/// converted to UTC and then shifted by `venue_utc_offset_ms`.
Timestamp parse_timestamp(std::string_view text, std::int64_t venue_utc_offset_ms = 0);

/// "YYYY-MM-DDTHH:MM:SS" with ".fff" appended when the millisecond part is nonzero.
std::string format_timestamp(Timestamp t);

/// Parses "+HH:MM", "-HH", "Z" etc. into milliseconds.
std::int64_t parse_utc_offset(std::string_view text);

inline double ms_to_hours(std::int64_t ms) { return static_cast<double>(ms) / kMsPerHour; }

}  // namespace newsjump
