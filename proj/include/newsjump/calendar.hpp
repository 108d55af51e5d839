#pragma once

#include "newsjump/time.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace newsjump {

class KeyValueFile;

struct Session {
    Date date;
    Timestamp open;
    Timestamp close;
};

/// Trading halt for one asset; observations in [start, end) are discarded.
struct HaltInterval {
    std::string asset_id;
    Timestamp start;
    Timestamp end;
};

/// Venue trading hours over a date range.
///
/// Every trading date carries one session [open, close] in venue-local time.
/// Dates inside [first_date, last_date] that are not trading dates are
/// weekends or holidays.
class SessionCalendar {
public:
    SessionCalendar() = default;
    SessionCalendar(std::string venue, std::int64_t open_ms, std::int64_t close_ms, Date first_date,
                    Date last_date, std::vector<Date> trading_dates, std::vector<HaltInterval> halts = {});

    /// Monday-Friday sessions in [first, last] minus `holidays`.
    static SessionCalendar weekdays(std::string venue, std::int64_t open_ms, std::int64_t close_ms, Date first,
                                    Date last, const std::vector<Date>& holidays = {});

    /// Reads the calendar key-value format (venue, timezone, utc_offset, open,
    /// close, first_date, last_date, holidays, dates, halt).
    static SessionCalendar from_kv(const KeyValueFile& kv);
    static SessionCalendar load(const std::filesystem::path& path);
    /// Writes the key-value format read by `load`.
    std::string to_kv() const;

    const std::string& venue() const { return venue_; }
    const std::string& timezone() const { return timezone_; }
    void set_timezone(std::string label, std::int64_t utc_offset_ms);
    std::int64_t utc_offset_ms() const { return utc_offset_ms_; }
    std::int64_t open_ms() const { return open_ms_; }
    std::int64_t close_ms() const { return close_ms_; }
    std::int64_t session_length_ms() const { return close_ms_ - open_ms_; }
    Date first_date() const { return first_date_; }
    Date last_date() const { return last_date_; }

    const std::vector<Session>& sessions() const { return sessions_; }
    const std::vector<HaltInterval>& halts() const { return halts_; }
    std::vector<HaltInterval> halts_for(const std::string& asset_id) const;

    bool covers(Date d) const { return d >= first_date_ && d <= last_date_; }
    /// Index of the session held on `d`, if `d` is a trading date.
    std::optional<std::size_t> session_index(Date d) const;
    /// True when `t` lies in [open, close] of its date's session.
    bool in_session(Timestamp t) const;

private:
    std::string venue_;
    std::string timezone_;
    std::int64_t utc_offset_ms_ = 0;
    std::int64_t open_ms_ = 0;
    std::int64_t close_ms_ = 0;
    Date first_date_;
    Date last_date_;
    std::vector<Session> sessions_;
    std::vector<HaltInterval> halts_;
};

}  // namespace newsjump
