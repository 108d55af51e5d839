#include "newsjump/time.hpp"

#include "newsjump/error.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace newsjump {

namespace {


int parse_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    int value = 0;
    if (pos + len > text.size()) throw DataError("truncated date/time: '" + std::string(whole) + "'");
    auto first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len)
        throw DataError("malformed date/time: '" + std::string(whole) + "'");
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace

Date Date::from_ymd(int y, unsigned m, unsigned d) {
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw DataError("invalid calendar date");
    return Date{static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

Date Date::parse(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw DataError("expected YYYY-MM-DD, got '" + std::string(text) + "'");
    return from_ymd(parse_int(text, 0, 4, text), static_cast<unsigned>(parse_int(text, 5, 2, text)),
                    static_cast<unsigned>(parse_int(text, 8, 2, text)));
}

int Date::year() const { return int(std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{days}}}.year()); }
unsigned Date::month() const { return unsigned(std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{days}}}.month()); }
unsigned Date::day() const { return unsigned(std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{days}}}.day()); }
unsigned Date::weekday() const { return std::chrono::weekday{std::chrono::sys_days{std::chrono::days{days}}}.c_encoding(); }

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

Date Timestamp::date() const {
    auto d = ms / kMsPerDay;
    if (ms < 0 && ms % kMsPerDay != 0) --d;
    return Date{static_cast<std::int32_t>(d)};
}

std::int64_t Timestamp::ms_of_day() const { return ms - static_cast<std::int64_t>(date().days) * kMsPerDay; }

std::int64_t parse_clock(std::string_view text) {
    text = trim(text);
    if (text.size() != 5 && text.size() != 8) throw DataError("expected HH:MM[:SS], got '" + std::string(text) + "'");
    if (text[2] != ':' || (text.size() == 8 && text[5] != ':'))
        throw DataError("expected HH:MM[:SS], got '" + std::string(text) + "'");
    const int h = parse_int(text, 0, 2, text);
    const int m = parse_int(text, 3, 2, text);
    const int s = text.size() == 8 ? parse_int(text, 6, 2, text) : 0;
    if (h > 24 || m > 59 || s > 59 || (h == 24 && (m != 0 || s != 0)))
        throw DataError("clock time out of range: '" + std::string(text) + "'");
    return h * kMsPerHour + m * kMsPerMinute + s * kMsPerSecond;
}

std::string format_clock(std::int64_t ms_of_day) {
    char buf[32];
    const auto secs = ms_of_day / kMsPerSecond;
    std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", static_cast<long long>(secs / 3600),
                  static_cast<long long>((secs / 60) % 60), static_cast<long long>(secs % 60));
    return buf;
}

std::int64_t parse_utc_offset(std::string_view text) {
    text = trim(text);
    if (text.empty() || text == "Z" || text == "z") return 0;
    const int sign = text[0] == '-' ? -1 : 1;
    if (text[0] != '+' && text[0] != '-') throw DataError("malformed UTC offset '" + std::string(text) + "'");
    text.remove_prefix(1);
    int h = 0, m = 0;
    if (text.size() == 2) {
        h = parse_int(text, 0, 2, text);
    } else if (text.size() == 4) {
        h = parse_int(text, 0, 2, text);
        m = parse_int(text, 2, 2, text);
    } else if (text.size() == 5 && text[2] == ':') {
        h = parse_int(text, 0, 2, text);
        m = parse_int(text, 3, 2, text);
    } else {
        throw DataError("malformed UTC offset '" + std::string(text) + "'");
    }
    return sign * (h * kMsPerHour + m * kMsPerMinute);
}

Timestamp parse_timestamp(std::string_view text, std::int64_t venue_utc_offset_ms) {
    text = trim(text);
    if (text.size() < 16) throw DataError("malformed timestamp '" + std::string(text) + "'");
    const Date d = Date::parse(text.substr(0, 10));
    if (text[10] != 'T' && text[10] != ' ') throw DataError("malformed timestamp '" + std::string(text) + "'");
    std::size_t pos = 11;
    const int h = parse_int(text, pos, 2, text);
    if (text[pos + 2] != ':') throw DataError("malformed timestamp '" + std::string(text) + "'");
    const int mi = parse_int(text, pos + 3, 2, text);
    pos += 5;
    int s = 0;
    std::int64_t frac_ms = 0;
    if (pos < text.size() && text[pos] == ':') {
        s = parse_int(text, pos + 1, 2, text);
        pos += 3;
        if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
            ++pos;
            std::int64_t scale = 100;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
                frac_ms += (text[pos] - '0') * scale;
                scale /= 10;
                ++pos;
            }
        }
    }
    if (h > 23 || mi > 59 || s > 60) throw DataError("clock out of range in '" + std::string(text) + "'");
    Timestamp t = Timestamp::at(d, h * kMsPerHour + mi * kMsPerMinute + s * kMsPerSecond + frac_ms);
    if (pos < text.size()) t = t - parse_utc_offset(text.substr(pos)) + venue_utc_offset_ms;
    return t;
}

std::string format_timestamp(Timestamp t) {
    const auto ms = t.ms_of_day();
    std::string out = t.date().to_string() + 'T' + format_clock(ms);
    if (ms % kMsPerSecond != 0) {
        char buf[8];
        std::snprintf(buf, sizeof buf, ".%03lld", static_cast<long long>(ms % kMsPerSecond));
        out += buf;
    }
    return out;
}

}  // namespace newsjump
