#pragma once

#include "newsjump/calendar.hpp"
#include "newsjump/jumps.hpp"
#include "newsjump/time.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace newsjump {

struct Announcement {
    std::string asset_id;
    Timestamp time;
    /// "scheduled", "non-scheduled" or any category name.
    std::string label;
    std::string source_id;
};

/// Reads the announcement CSV schema `asset_id,timestamp,class,source_id`.
/// Lines starting with '#' are metadata and skipped.
std::vector<Announcement> read_announcements(std::istream& in, std::int64_t venue_utc_offset_ms = 0);
std::vector<Announcement> read_announcements_file(const std::filesystem::path& path,
                                                  std::int64_t venue_utc_offset_ms = 0);
void write_announcements(std::ostream& out, std::span<const Announcement> events,
                         std::span<const std::string> metadata = {});

enum class ClockMode { trading, calendar };

/// Elapsed time on the trading clock.
///
/// In-session time counts in full; every stretch of non-trading time
/// (overnight, weekend, holiday, before the first or after the last session)
/// that a distance crosses counts at most one bar length.
class TradingClock {
public:
    TradingClock(const SessionCalendar& calendar, std::int64_t bar_ms, ClockMode mode = ClockMode::trading);

    /// Capped distance in milliseconds. Throws ContractError when from > to.
    std::int64_t distance_ms(Timestamp from, Timestamp to) const;
    double distance_hours(Timestamp from, Timestamp to) const { return ms_to_hours(distance_ms(from, to)); }

    std::int64_t bar_ms() const { return bar_ms_; }
    ClockMode mode() const { return mode_; }

private:
    struct Position {
        bool in_session = false;
        // Session index when in_session; otherwise the index of the session
        // that ends the gap (== session count for the trailing gap).
        std::size_t index = 0;
    };
    Position locate(Timestamp t) const;

    std::vector<Timestamp> opens_;
    std::vector<Timestamp> closes_;
    // Capped trading-clock coordinate at each session open.
    std::vector<std::int64_t> coord_;
    std::int64_t bar_ms_;
    ClockMode mode_;
};

/// Events with no other event of the same asset within +/- window (calendar
/// time, inclusive). Input order is preserved.
std::vector<Announcement> filter_confounded(std::span<const Announcement> events, double window_hours);

enum class Direction { forward, backward };

struct WaitingTime {
    Direction direction = Direction::forward;
    /// Index into the jump span; empty when censored.
    std::optional<std::size_t> match;
    std::int64_t ms = 0;

    bool censored() const { return !match.has_value(); }
    double hours() const { return ms_to_hours(ms); }
};

/// Distance from `t` to the start of the earliest jump interval that ends after `t`;
/// zero when `t` lies inside that interval. `jumps` sorted by start.
WaitingTime forward_distance(Timestamp t, std::span<const JumpRecord> jumps, const TradingClock& clock);

/// Distance from the end of the latest jump interval ending at or before `t` to `t`.
WaitingTime backward_distance(Timestamp t, std::span<const JumpRecord> jumps, const TradingClock& clock);

/// |L| of the forward and backward matches.
std::pair<std::optional<double>, std::optional<double>> nearest_jump_sizes(Timestamp t,
                                                                           std::span<const JumpRecord> jumps);

}  // namespace newsjump
