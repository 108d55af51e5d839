#pragma once

#include "newsjump/calendar.hpp"
#include "newsjump/time.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace newsjump {

struct TickRecord {
    std::string asset_id;
    Timestamp time;
    double bid = 0.0;
    double ask = 0.0;

    double mid() const { return 0.5 * (bid + ask); }
    double spread() const { return ask - bid; }
};

/// Column mapping for delimited tick files. The first line must be a header.
struct TickFormat {
    char delimiter = ',';
    /// Empty when the file holds a single asset; `default_asset` is used then.
    std::string asset_column = "asset";
    std::string time_column = "timestamp";
    std::string bid_column = "bid";
    std::string ask_column = "ask";
    std::string default_asset;
    /// Venue offset applied to timestamps that carry an explicit UTC offset.
    std::int64_t venue_utc_offset_ms = 0;
};

struct ParsedTicks {
    std::vector<TickRecord> ticks;
    std::size_t rows = 0;
    std::size_t rejected = 0;
    /// One "line N: reason" entry per rejected row.
    std::vector<std::string> reject_log;
};

/// Parses delimited tick data in file order.
///
/// Rows that fail to parse are skipped and itemised in the reject log. A
/// header missing a mapped column is a ConfigError; more than half of the
/// rows failing is a DataError (the mapping is almost certainly wrong).
ParsedTicks parse_ticks(std::istream& source, const TickFormat& format);
ParsedTicks parse_ticks_file(const std::filesystem::path& path, const TickFormat& format);

/// Per-rule removal counts of one clean_ticks call.
struct CleaningReport {
    std::size_t input = 0;
    std::size_t p1_out_of_session = 0;
    std::size_t p2_nonpositive = 0;
    std::size_t p3_merged = 0;
    std::size_t q1_crossed = 0;
    std::size_t q2_wide_spread = 0;
    std::size_t q3_outlier = 0;
    std::size_t q4_halted = 0;
    std::size_t output = 0;
};

struct CleaningParams {
    double spread_multiple = 50.0;
    /// Centered window length, the tick under test included.
    std::size_t outlier_window = 25;
    double outlier_mads = 10.0;
};

/// Applies P1-P3 then Q1-Q4 to the ticks of one asset, sorted by time.
///
/// The Q rules repeat until nothing more is removed, so the output is a
/// fixed point and cleaning is idempotent. Throws DataError when a tick's
/// date is outside the calendar's date range.
std::vector<TickRecord> clean_ticks(std::span<const TickRecord> ticks, const SessionCalendar& calendar,
                                    CleaningReport* report = nullptr, const CleaningParams& params = {});

/// One session of a regular mid-price grid.
struct QuoteSession {
    Date date;
    Timestamp start;
    std::vector<double> mids;
};

struct QuoteSeries {
    std::string asset_id;
    std::int64_t grid_ms = 0;
    std::shared_ptr<const SessionCalendar> calendar;
    std::vector<QuoteSession> sessions;

    Timestamp time(const QuoteSession& s, std::size_t k) const {
        return s.start + static_cast<std::int64_t>(k) * grid_ms;
    }
    std::size_t size() const;
};

/// Previous-tick sampling of cleaned, sorted ticks onto the session grid
/// [open, close] with the given spacing. Grid points before a session's first
/// tick take that first tick. Sessions without ticks are skipped and noted in
/// `log` when provided.
QuoteSeries resample(std::span<const TickRecord> ticks, std::int64_t interval_seconds,
                     std::shared_ptr<const SessionCalendar> calendar, std::vector<std::string>* log = nullptr);

/// Intraday log-returns at `bar_ms` spacing.
///
/// `starts[k]` marks the beginning of bar k, i.e. r_k = log S(start + bar) - log S(start).
struct ReturnSeries {
    std::string asset_id;
    std::int64_t bar_ms = 0;
    std::vector<Timestamp> starts;
    std::vector<double> returns;
    std::vector<std::uint32_t> session;

    std::size_t size() const { return returns.size(); }
};

/// Returns within sessions only; overnight returns are never formed.
ReturnSeries log_returns(const QuoteSeries& series, std::int64_t bar_seconds);

/// Groups ticks by asset, preserving order within each asset.
std::map<std::string, std::vector<TickRecord>> split_by_asset(std::span<const TickRecord> ticks);

}  // namespace newsjump
