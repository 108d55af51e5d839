#include "newsjump/calendar.hpp"

#include "newsjump/error.hpp"
#include "newsjump/kvfile.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace newsjump {

namespace {

std::vector<Date> weekday_dates(Date first, Date last, const std::vector<Date>& holidays) {
    std::vector<Date> dates;
    for (Date d = first; d <= last; d = d + 1) {
        const auto wd = d.weekday();
        if (wd == 0 || wd == 6) continue;
        if (std::find(holidays.begin(), holidays.end(), d) != holidays.end()) continue;
        dates.push_back(d);
    }
    return dates;
}

}  // namespace

SessionCalendar::SessionCalendar(std::string venue, std::int64_t open_ms, std::int64_t close_ms, Date first_date,
                                 Date last_date, std::vector<Date> trading_dates, std::vector<HaltInterval> halts)
    : venue_(std::move(venue)),
      open_ms_(open_ms),
      close_ms_(close_ms),
      first_date_(first_date),
      last_date_(last_date),
      halts_(std::move(halts)) {
    if (open_ms_ < 0 || close_ms_ > kMsPerDay || open_ms_ >= close_ms_)
        throw ConfigError("calendar: open must precede close within one day");
    if (last_date_ < first_date_) throw ConfigError("calendar: last_date precedes first_date");
    std::sort(trading_dates.begin(), trading_dates.end());
    trading_dates.erase(std::unique(trading_dates.begin(), trading_dates.end()), trading_dates.end());
    sessions_.reserve(trading_dates.size());
    for (Date d : trading_dates) {
        if (!covers(d)) throw ConfigError("calendar: trading date " + d.to_string() + " outside date range");
        sessions_.push_back({d, Timestamp::at(d, open_ms_), Timestamp::at(d, close_ms_)});
    }
    for (const auto& h : halts_) {
        if (!(h.start < h.end)) throw ConfigError("calendar: halt interval with start >= end");
        auto idx = session_index(h.start.date());
        if (!idx || h.start < sessions_[*idx].open || h.end > sessions_[*idx].close)
            throw ConfigError("calendar: halt for " + h.asset_id + " at " + format_timestamp(h.start) +
                              " lies outside session hours");
    }
}

SessionCalendar SessionCalendar::weekdays(std::string venue, std::int64_t open_ms, std::int64_t close_ms, Date first,
                                          Date last, const std::vector<Date>& holidays) {
    return SessionCalendar(std::move(venue), open_ms, close_ms, first, last, weekday_dates(first, last, holidays));
}

SessionCalendar SessionCalendar::from_kv(const KeyValueFile& kv) {
    auto require = [&](const char* key) {
        auto v = kv.get(key);
        if (!v || v->empty()) throw ConfigError(std::string("calendar: missing '") + key + "'");
        return *v;
    };
    const std::int64_t offset = kv.get("utc_offset") ? parse_utc_offset(*kv.get("utc_offset")) : 0;
    const auto open = parse_clock(require("open"));
    const auto close = parse_clock(require("close"));

    std::vector<Date> dates;
    for (const auto& line : kv.get_all("dates"))
        for (const auto& d : split_list(line)) dates.push_back(Date::parse(d));

    std::vector<Date> holidays;
    for (const auto& line : kv.get_all("holidays"))
        for (const auto& d : split_list(line)) holidays.push_back(Date::parse(d));

    Date first, last;
    if (dates.empty()) {
        first = Date::parse(require("first_date"));
        last = Date::parse(require("last_date"));
    } else {
        auto [lo, hi] = std::minmax_element(dates.begin(), dates.end());
        first = kv.get("first_date") ? Date::parse(*kv.get("first_date")) : *lo;
        last = kv.get("last_date") ? Date::parse(*kv.get("last_date")) : *hi;
        std::erase_if(dates, [&](Date d) { return std::find(holidays.begin(), holidays.end(), d) != holidays.end(); });
    }

    std::vector<HaltInterval> halts;
    for (const auto& line : kv.get_all("halt")) {
        std::istringstream ss(line);
        std::string asset, start, end;
        if (!(ss >> asset >> start >> end)) throw ConfigError("calendar: halt needs 'asset start end', got '" + line + "'");
        halts.push_back({asset, parse_timestamp(start, offset), parse_timestamp(end, offset)});
    }

    if (dates.empty()) dates = weekday_dates(first, last, holidays);
    SessionCalendar cal(kv.get("venue").value_or(""), open, close, first, last, std::move(dates), std::move(halts));
    cal.set_timezone(kv.get("timezone").value_or(""), offset);
    return cal;
}

SessionCalendar SessionCalendar::load(const std::filesystem::path& path) { return from_kv(KeyValueFile::load(path)); }

std::string SessionCalendar::to_kv() const {
    std::ostringstream out;
    out << "venue = " << venue_ << "\n";
    if (!timezone_.empty()) out << "timezone = " << timezone_ << "\n";
    if (utc_offset_ms_ != 0) {
        const auto m = (utc_offset_ms_ < 0 ? -utc_offset_ms_ : utc_offset_ms_) / kMsPerMinute;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%c%02lld:%02lld", utc_offset_ms_ < 0 ? '-' : '+', static_cast<long long>(m / 60),
                      static_cast<long long>(m % 60));
        out << "utc_offset = " << buf << "\n";
    }
    out << "open = " << format_clock(open_ms_).substr(0, 5) << "\n";
    out << "close = " << format_clock(close_ms_).substr(0, 5) << "\n";
    out << "first_date = " << first_date_.to_string() << "\n";
    out << "last_date = " << last_date_.to_string() << "\n";
    for (std::size_t i = 0; i < sessions_.size(); ++i) {
        if (i % 10 == 0) out << (i ? "\n" : "") << "dates = ";
        else out << ", ";
        out << sessions_[i].date.to_string();
    }
    if (!sessions_.empty()) out << "\n";
    for (const auto& h : halts_)
        out << "halt = " << h.asset_id << " " << format_timestamp(h.start) << " " << format_timestamp(h.end) << "\n";
    return out.str();
}

void SessionCalendar::set_timezone(std::string label, std::int64_t utc_offset_ms) {
    timezone_ = std::move(label);
    utc_offset_ms_ = utc_offset_ms;
}

std::vector<HaltInterval> SessionCalendar::halts_for(const std::string& asset_id) const {
    std::vector<HaltInterval> out;
    for (const auto& h : halts_)
        if (h.asset_id == asset_id) out.push_back(h);
    return out;
}

std::optional<std::size_t> SessionCalendar::session_index(Date d) const {
    auto it = std::lower_bound(sessions_.begin(), sessions_.end(), d,
                               [](const Session& s, Date v) { return s.date < v; });
    if (it == sessions_.end() || it->date != d) return std::nullopt;
    return static_cast<std::size_t>(it - sessions_.begin());
}

bool SessionCalendar::in_session(Timestamp t) const {
    auto idx = session_index(t.date());
    return idx && t >= sessions_[*idx].open && t <= sessions_[*idx].close;
}

}  // namespace newsjump
