#include "fixtures.hpp"

#include "newsjump/error.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace newsjump;
using fixtures::at;

namespace {

TickRecord tick(Timestamp t, double bid, double ask, const std::string& asset = "A") { return {asset, t, bid, ask}; }

// Brute-force Q3: sort-based median over the 25-tick window clamped to the day.
std::set<std::size_t> q3_oracle(const std::vector<TickRecord>& day, std::size_t window, double mads) {
    std::set<std::size_t> out;
    const std::size_t n = day.size();
    if (n < 3) return out;
    const std::size_t w = std::min(window, n);
    for (std::size_t i = 0; i < n; ++i) {
        long start = static_cast<long>(i) - static_cast<long>(w / 2);
        start = std::clamp(start, 0L, static_cast<long>(n - w));
        std::vector<double> nb;
        for (std::size_t j = static_cast<std::size_t>(start); j < static_cast<std::size_t>(start) + w; ++j)
            if (j != i) nb.push_back(day[j].mid());
        std::sort(nb.begin(), nb.end());
        const std::size_t m = nb.size();
        const double med = m % 2 ? nb[m / 2] : 0.5 * (nb[m / 2 - 1] + nb[m / 2]);
        double mad = 0.0;
        for (double x : nb) mad += std::fabs(x - med);
        mad /= static_cast<double>(m);
        if (mad > 0.0 && std::fabs(day[i].mid() - med) > mads * mad) out.insert(i);
    }
    return out;
}

}  // namespace

// ===========================================================================
// parse_ticks
// ===========================================================================

TEST(ParseTicks, WellFormedRows) {
    std::istringstream in(
        "asset,timestamp,bid,ask\n"
        "A,2006-01-02T09:00:00,10.0,10.1\n"
        "A,2006-01-02T09:00:01,10.0,10.2\n"
        "B,2006-01-02T09:00:02,20.0,20.1\n");
    const auto r = parse_ticks(in, {});
    EXPECT_EQ(r.ticks.size(), 3u);
    EXPECT_EQ(r.rejected, 0u);
    EXPECT_EQ(r.ticks[2].asset_id, "B");
    EXPECT_DOUBLE_EQ(r.ticks[1].mid(), 10.1);
}

TEST(ParseTicks, BadFieldIsCountedAndSkipped) {
    std::istringstream in(
        "asset,timestamp,bid,ask\n"
        "A,2006-01-02T09:00:00,10.0,10.1\n"
        "A,2006-01-02T09:00:01,abc,10.2\n"
        "A,2006-01-02T09:00:02,10.0,10.1\n");
    const auto r = parse_ticks(in, {});
    EXPECT_EQ(r.ticks.size(), 2u);
    EXPECT_EQ(r.rejected, 1u);
    ASSERT_EQ(r.reject_log.size(), 1u);
    EXPECT_NE(r.reject_log[0].find("3"), std::string::npos);
}

TEST(ParseTicks, ShuffledRowsKeptInFileOrder) {
    std::vector<std::string> rows;
    for (int s = 0; s < 10; ++s)
        rows.push_back("A,2006-01-02T09:00:" + std::string(s < 10 ? "0" : "") + std::to_string(s) + "," +
                       std::to_string(10 + s) + ",20");
    std::mt19937 rng(3);
    std::shuffle(rows.begin(), rows.end(), rng);
    std::string text = "asset,timestamp,bid,ask\n";
    for (const auto& r : rows) text += r + "\n";
    std::istringstream in(text);
    const auto parsed = parse_ticks(in, {});
    ASSERT_EQ(parsed.ticks.size(), 10u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto expected = std::stod(rows[i].substr(rows[i].find(',', 2) + 1));
        EXPECT_DOUBLE_EQ(parsed.ticks[i].bid, expected);
    }
    const auto cleaned = clean_ticks(parsed.ticks, fixtures::weekday_calendar());
    for (std::size_t i = 1; i < cleaned.size(); ++i) EXPECT_LT(cleaned[i - 1].time, cleaned[i].time);
}

TEST(ParseTicks, CustomColumnsAndDelimiter) {
    std::istringstream in("Time;Bid;Ask\n2006-01-02 09:00:00;1;2\n");
    TickFormat f;
    f.delimiter = ';';
    f.asset_column = "";
    f.time_column = "Time";
    f.bid_column = "Bid";
    f.ask_column = "Ask";
    f.default_asset = "X";
    const auto r = parse_ticks(in, f);
    ASSERT_EQ(r.ticks.size(), 1u);
    EXPECT_EQ(r.ticks[0].asset_id, "X");
}

TEST(ParseTicks, MissingColumnIsConfigError) {
    std::istringstream in("asset,time,bid,ask\nA,2006-01-02T09:00:00,1,2\n");
    EXPECT_THROW(parse_ticks(in, {}), ConfigError);
}

TEST(ParseTicks, MostlyGarbageIsDataError) {
    std::istringstream in("asset,timestamp,bid,ask\nA,x,1,2\nA,y,1,2\nA,2006-01-02T09:00:00,1,2\n");
    EXPECT_THROW(parse_ticks(in, {}), DataError);
}

// ===========================================================================
// clean_ticks
// ===========================================================================

TEST(CleanTicks, SingleGoodTickPasses) {
    const auto cal = fixtures::weekday_calendar();
    std::vector<TickRecord> in{tick(at("2006-01-02", "10:00"), 10, 10.1)};
    const auto out = clean_ticks(in, cal);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].time, in[0].time);
}

TEST(CleanTicks, EmptyInputIsEmptyOutput) {
    EXPECT_TRUE(clean_ticks({}, fixtures::weekday_calendar()).empty());
}

TEST(CleanTicks, P1DropsPreOpenTick) {
    const auto cal = fixtures::weekday_calendar();
    std::vector<TickRecord> in{tick(at("2006-01-02", "08:59"), 10, 10.1), tick(at("2006-01-02", "09:00"), 10, 10.1)};
    CleaningReport rep;
    const auto out = clean_ticks(in, cal, &rep);
    EXPECT_EQ(out.size(), 1u);
    EXPECT_EQ(rep.p1_out_of_session, 1u);
}

TEST(CleanTicks, P2AndQ1) {
    const auto cal = fixtures::weekday_calendar();
    std::vector<TickRecord> in{tick(at("2006-01-02", "10:00"), 0, 10.1), tick(at("2006-01-02", "10:01"), 10.2, 10.1),
                               tick(at("2006-01-02", "10:02"), 10, 10.1)};
    CleaningReport rep;
    const auto out = clean_ticks(in, cal, &rep);
    EXPECT_EQ(out.size(), 1u);
    EXPECT_EQ(rep.p2_nonpositive, 1u);
    EXPECT_EQ(rep.q1_crossed, 1u);
    for (const auto& t : out) EXPECT_GE(t.ask, t.bid);
}

TEST(CleanTicks, P3MedianMergeIsOrderFree) {
    const auto cal = fixtures::weekday_calendar();
    const auto t = at("2006-01-02", "10:00");
    std::vector<TickRecord> in{tick(t, 10.0, 10.3), tick(t, 10.2, 10.4), tick(t, 9.0, 10.5)};
    CleaningReport rep;
    const auto out = clean_ticks(in, cal, &rep);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_DOUBLE_EQ(out[0].bid, 10.0);
    EXPECT_DOUBLE_EQ(out[0].ask, 10.4);
    EXPECT_EQ(rep.p3_merged, 2u);
    std::sort(in.begin(), in.end(), [](const TickRecord& a, const TickRecord& b) { return a.bid > b.bid; });
    const auto again = clean_ticks(in, cal);
    EXPECT_DOUBLE_EQ(again[0].bid, out[0].bid);
    EXPECT_DOUBLE_EQ(again[0].ask, out[0].ask);
}

TEST(CleanTicks, Q2DropsWideSpread) {
    const auto cal = fixtures::weekday_calendar();
    std::vector<TickRecord> in;
    for (int i = 0; i < 20; ++i) in.push_back(tick(at("2006-01-02", "10:00") + i * kMsPerSecond, 10, 10.01));
    in[7].ask = 10.0 + 0.01 * 51;
    in[7].bid = 10.0;
    CleaningReport rep;
    const auto out = clean_ticks(in, cal, &rep);
    EXPECT_EQ(rep.q2_wide_spread, 1u);
    EXPECT_EQ(out.size(), 19u);
}

TEST(CleanTicks, Q3RemovesExactlyInjectedOutliers) {
    const auto cal = fixtures::weekday_calendar();
    std::mt19937_64 rng(11);
    std::normal_distribution<double> step(0.0, 0.01);
    std::vector<TickRecord> day;
    double mid = 50.0;
    for (int i = 0; i < 1000; ++i) {
        mid += step(rng);
        day.push_back(tick(at("2006-01-03", "09:05") + i * 20 * kMsPerSecond, mid - 0.005, mid + 0.005));
    }
    const std::vector<std::size_t> targets{40, 260, 500, 731, 990};
    for (auto i : targets) {
        // 20 MADs of the neighbourhood, measured by the same brute-force definition.
        long start = std::clamp(static_cast<long>(i) - 12L, 0L, 1000L - 25L);
        std::vector<double> nb;
        for (long j = start; j < start + 25; ++j)
            if (static_cast<std::size_t>(j) != i) nb.push_back(day[j].mid());
        std::sort(nb.begin(), nb.end());
        const double med = 0.5 * (nb[11] + nb[12]);
        double mad = 0.0;
        for (double x : nb) mad += std::fabs(x - med);
        mad /= 24.0;
        const double target = med + 20.0 * mad;
        day[i].bid = target - 0.005;
        day[i].ask = target + 0.005;
    }
    // Oracle to a fixed point.
    std::vector<TickRecord> expect = day;
    for (;;) {
        const auto drop = q3_oracle(expect, 25, 10.0);
        if (drop.empty()) break;
        std::vector<TickRecord> keep;
        for (std::size_t i = 0; i < expect.size(); ++i)
            if (!drop.count(i)) keep.push_back(expect[i]);
        expect = keep;
    }
    CleaningReport rep;
    const auto out = clean_ticks(day, cal, &rep);
    EXPECT_EQ(rep.q3_outlier, 5u);
    ASSERT_EQ(out.size(), expect.size());
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i].time, expect[i].time);
    std::set<Timestamp> kept;
    for (const auto& t : out) kept.insert(t.time);
    for (auto i : targets) EXPECT_FALSE(kept.count(day[i].time));
}

TEST(CleanTicks, Q4DropsHaltedTicks) {
    const Date d = Date::parse("2006-01-02");
    const SessionCalendar cal("X", parse_clock("09:00"), parse_clock("17:30"), d, d, {d},
                              {{"A", at("2006-01-02", "10:00"), at("2006-01-02", "11:00")}});
    std::vector<TickRecord> in{tick(at("2006-01-02", "09:59:59"), 10, 10.1), tick(at("2006-01-02", "10:00"), 10, 10.1),
                               tick(at("2006-01-02", "10:59:59"), 10, 10.1), tick(at("2006-01-02", "11:00"), 10, 10.1),
                               tick(at("2006-01-02", "11:00"), 10, 10.1, "A")};
    in.pop_back();
    CleaningReport rep;
    const auto out = clean_ticks(in, cal, &rep);
    EXPECT_EQ(rep.q4_halted, 2u);
    EXPECT_EQ(out.size(), 2u);
}

TEST(CleanTicks, UncoveredDateIsDataError) {
    const auto cal = fixtures::weekday_calendar(1);
    std::vector<TickRecord> in{tick(at("2007-05-01", "10:00"), 10, 10.1)};
    EXPECT_THROW(clean_ticks(in, cal), DataError);
}

TEST(CleanTicks, MixedAssetsRejected) {
    const auto cal = fixtures::weekday_calendar();
    std::vector<TickRecord> in{tick(at("2006-01-02", "10:00"), 10, 10.1, "A"),
                               tick(at("2006-01-02", "10:01"), 10, 10.1, "B")};
    EXPECT_THROW(clean_ticks(in, cal), ContractError);
}

TEST(CleanTicks, Idempotent) {
    const auto cal = fixtures::weekday_calendar();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<TickRecord> in;
    double mid = 30;
    for (int i = 0; i < 3000; ++i) {
        mid += 0.02 * (u(rng) - 0.5);
        const auto t = Timestamp::at(Date::parse("2006-01-02") + static_cast<int>(i / 400),
                                     parse_clock("08:30") + static_cast<std::int64_t>(u(rng) * 10 * kMsPerHour));
        double bid = mid - 0.01, ask = mid + 0.01;
        const double r = u(rng);
        if (r < 0.01) bid = -1;
        else if (r < 0.02) std::swap(bid, ask);
        else if (r < 0.03) ask += 5;
        else if (r < 0.04) bid = ask = mid * 1.2;
        in.push_back(tick(t, bid, ask));
    }
    const auto once = clean_ticks(in, cal);
    const auto twice = clean_ticks(once, cal);
    ASSERT_EQ(once.size(), twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        EXPECT_EQ(once[i].time, twice[i].time);
        EXPECT_EQ(once[i].bid, twice[i].bid);
        EXPECT_EQ(once[i].ask, twice[i].ask);
    }
}

// ===========================================================================
// resample and log_returns
// ===========================================================================

TEST(Resample, TicksOnGridPassThrough) {
    auto cal = std::make_shared<const SessionCalendar>(fixtures::weekday_calendar(1));
    std::vector<TickRecord> ticks;
    const auto open = at("2006-01-02", "09:00");
    for (int k = 0; k <= 3060; ++k) ticks.push_back(tick(open + k * 10 * kMsPerSecond, 10 + k * 0.001, 10.01 + k * 0.001));
    const auto q = resample(ticks, 10, cal);
    ASSERT_EQ(q.sessions.size(), 1u);
    ASSERT_EQ(q.sessions[0].mids.size(), 3061u);
    for (std::size_t k = 0; k < ticks.size(); ++k) EXPECT_DOUBLE_EQ(q.sessions[0].mids[k], ticks[k].mid());
}

TEST(Resample, PreviousTickRuleAndBackfill) {
    auto cal = std::make_shared<const SessionCalendar>(fixtures::weekday_calendar(1));
    std::vector<TickRecord> ticks{tick(at("2006-01-02", "09:00:03"), 10, 10.2)};
    std::vector<std::string> log;
    const auto q = resample(ticks, 10, cal, &log);
    ASSERT_EQ(q.sessions.size(), 1u);
    EXPECT_DOUBLE_EQ(q.sessions[0].mids[0], 10.1);  // backfilled
    EXPECT_DOUBLE_EQ(q.sessions[0].mids[1], 10.1);  // 09:00:10
    EXPECT_EQ(log.size(), 4u);                      // four sessions without ticks
}

TEST(Resample, MatchesLinearScanOracle) {
    auto cal = std::make_shared<const SessionCalendar>(fixtures::weekday_calendar(1));
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::int64_t> offset(0, 30 * kMsPerMinute);
    const auto open = at("2006-01-04", "09:00");
    std::vector<TickRecord> ticks;
    for (int i = 0; i < 100; ++i) {
        const double m = 20 + 0.01 * i;
        ticks.push_back(tick(open + 5 * kMsPerMinute + offset(rng), m - 0.01, m + 0.01));
    }
    std::sort(ticks.begin(), ticks.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
    const auto q = resample(ticks, 10, cal);
    ASSERT_EQ(q.sessions.size(), 1u);
    const auto& s = q.sessions[0];
    for (std::size_t k = 0; k < s.mids.size(); ++k) {
        const auto g = q.time(s, k);
        EXPECT_GE(g, cal->sessions()[2].open);
        EXPECT_LE(g, cal->sessions()[2].close);
        double expected = ticks.front().mid();
        for (const auto& t : ticks)
            if (t.time <= g) expected = t.mid();
        ASSERT_DOUBLE_EQ(s.mids[k], expected) << "grid point " << k;
    }
}

TEST(LogReturns, ConstantPriceGivesZeros) {
    QuoteSeries q;
    q.grid_ms = 900 * kMsPerSecond;
    q.sessions.push_back({Date::parse("2006-01-02"), at("2006-01-02", "09:00"), std::vector<double>(35, 42.0)});
    const auto r = log_returns(q, 900);
    EXPECT_EQ(r.size(), 34u);
    for (double x : r.returns) EXPECT_EQ(x, 0.0);
}

TEST(LogReturns, Definition) {
    QuoteSeries q;
    q.grid_ms = 900 * kMsPerSecond;
    q.sessions.push_back({Date::parse("2006-01-02"), at("2006-01-02", "09:00"), {100.0, 101.0}});
    const auto r = log_returns(q, 900);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_NEAR(r.returns[0], std::log(1.01), 1e-15);
    EXPECT_EQ(r.starts[0], at("2006-01-02", "09:00"));
}

TEST(LogReturns, NoReturnAcrossSessions) {
    QuoteSeries q;
    q.grid_ms = 900 * kMsPerSecond;
    for (const char* d : {"2006-01-02", "2006-01-03"})
        q.sessions.push_back({Date::parse(d), at(d, "09:00"), std::vector<double>(34, 1.0)});
    q.sessions[1].mids.assign(34, 2.0);
    const auto r = log_returns(q, 900);
    EXPECT_EQ(r.size(), 66u);
    for (double x : r.returns) EXPECT_EQ(x, 0.0);
    EXPECT_EQ(r.session[32], 0u);
    EXPECT_EQ(r.session[33], 1u);
}

TEST(LogReturns, BarNotMultipleOfGrid) {
    QuoteSeries q;
    q.grid_ms = 10 * kMsPerSecond;
    EXPECT_THROW(log_returns(q, 15), ConfigError);
}

TEST(LogReturns, AggregatesGridToBars) {
    QuoteSeries q;
    q.grid_ms = 10 * kMsPerSecond;
    std::vector<double> mids;
    for (int k = 0; k <= 180; ++k) mids.push_back(100.0 + k);
    q.sessions.push_back({Date::parse("2006-01-02"), at("2006-01-02", "09:00"), mids});
    const auto r = log_returns(q, 900);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_DOUBLE_EQ(r.returns[0], std::log(190.0 / 100.0));
    EXPECT_EQ(r.starts[1], at("2006-01-02", "09:15"));
}
