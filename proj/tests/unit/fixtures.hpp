#pragma once

#include "newsjump/calendar.hpp"
#include "newsjump/ingest.hpp"
#include "newsjump/jumps.hpp"
#include "newsjump/time.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using namespace newsjump;

inline Timestamp at(const char* date, const char* clock) {
    return Timestamp::at(Date::parse(date), parse_clock(clock));
}

/// Weekday calendar 09:00-17:30 starting 2006-01-02.
inline SessionCalendar weekday_calendar(int weeks = 2, std::int64_t open = 9 * kMsPerHour,
                                        std::int64_t close = 17 * kMsPerHour + 30 * kMsPerMinute) {
    const Date first = Date::from_ymd(2006, 1, 2);
    return SessionCalendar::weekdays("TEST", open, close, first, first + (7 * weeks - 3));
}

inline JumpRecord jump(Timestamp start, std::int64_t bar_ms, double size = 5.0) {
    JumpRecord j;
    j.asset_id = "A";
    j.start = start;
    j.end = start + bar_ms;
    j.statistic = size;
    return j;
}

/// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("newsjump_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
