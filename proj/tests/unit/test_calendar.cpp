#include "fixtures.hpp"

#include "newsjump/error.hpp"
#include "newsjump/kvfile.hpp"

#include <gtest/gtest.h>

using namespace newsjump;
using fixtures::at;

TEST(Calendar, WeekdaysSkipWeekendsAndHolidays) {
    const auto first = Date::parse("2006-01-02");
    const auto cal = SessionCalendar::weekdays("X", parse_clock("09:00"), parse_clock("17:30"), first,
                                               Date::parse("2006-01-15"), {Date::parse("2006-01-06")});
    EXPECT_EQ(cal.sessions().size(), 9u);
    EXPECT_FALSE(cal.session_index(Date::parse("2006-01-07")));
    EXPECT_FALSE(cal.session_index(Date::parse("2006-01-06")));
    EXPECT_EQ(cal.session_index(Date::parse("2006-01-09")), 4u);
    for (const auto& s : cal.sessions()) EXPECT_LT(s.open, s.close);
}

TEST(Calendar, InSessionIsInclusive) {
    const auto cal = fixtures::weekday_calendar();
    EXPECT_TRUE(cal.in_session(at("2006-01-02", "09:00")));
    EXPECT_TRUE(cal.in_session(at("2006-01-02", "17:30")));
    EXPECT_FALSE(cal.in_session(at("2006-01-02", "08:59:59")));
    EXPECT_FALSE(cal.in_session(at("2006-01-07", "12:00")));
}

TEST(Calendar, RejectsOpenAfterClose) {
    EXPECT_THROW(SessionCalendar::weekdays("X", parse_clock("17:00"), parse_clock("09:00"), Date::parse("2006-01-02"),
                                           Date::parse("2006-01-06")),
                 ConfigError);
}

TEST(Calendar, RejectsHaltOutsideSession) {
    const auto first = Date::parse("2006-01-02");
    std::vector<HaltInterval> halts{{"A", at("2006-01-02", "08:00"), at("2006-01-02", "10:00")}};
    EXPECT_THROW(SessionCalendar("X", parse_clock("09:00"), parse_clock("17:30"), first, first, {first}, halts),
                 ConfigError);
}

TEST(Calendar, KeyValueRoundTrip) {
    const char* text =
        "venue = OMX\n"
        "timezone = Europe/Stockholm\n"
        "utc_offset = +01:00\n"
        "open = 09:00\n"
        "close = 17:30\n"
        "first_date = 2006-01-02\n"
        "last_date = 2006-01-13\n"
        "holidays = 2006-01-06\n"
        "halt = ERIC 2006-01-04T10:00:00 2006-01-04T11:00:00\n";
    const auto cal = SessionCalendar::from_kv(KeyValueFile::parse(text));
    EXPECT_EQ(cal.venue(), "OMX");
    EXPECT_EQ(cal.utc_offset_ms(), kMsPerHour);
    EXPECT_EQ(cal.sessions().size(), 9u);
    ASSERT_EQ(cal.halts_for("ERIC").size(), 1u);
    EXPECT_TRUE(cal.halts_for("VOLV").empty());

    const auto again = SessionCalendar::from_kv(KeyValueFile::parse(cal.to_kv()));
    EXPECT_EQ(again.to_kv(), cal.to_kv());
    EXPECT_EQ(again.sessions().size(), cal.sessions().size());
}

TEST(Calendar, ExplicitDateList) {
    const char* text =
        "venue = X\nopen = 10:00\nclose = 16:00\nfirst_date = 2006-01-02\nlast_date = 2006-01-31\n"
        "dates = 2006-01-03, 2006-01-10\n";
    const auto cal = SessionCalendar::from_kv(KeyValueFile::parse(text));
    ASSERT_EQ(cal.sessions().size(), 2u);
    EXPECT_TRUE(cal.covers(Date::parse("2006-01-20")));
    EXPECT_FALSE(cal.session_index(Date::parse("2006-01-20")));
}

TEST(Calendar, MissingKeyIsConfigError) {
    EXPECT_THROW(SessionCalendar::from_kv(KeyValueFile::parse("venue = X\nopen = 09:00\n")), ConfigError);
}
