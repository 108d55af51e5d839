#include "newsjump/ingest.hpp"

#include "newsjump/csv.hpp"
#include "newsjump/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>

namespace newsjump {

namespace {

double median_of(std::vector<double> v) {
    const auto n = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

// Half-open index ranges of ticks sharing a calendar date.
std::vector<std::pair<std::size_t, std::size_t>> day_blocks(const std::vector<TickRecord>& ticks) {
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= ticks.size(); ++i) {
        if (i == ticks.size() || ticks[i].time.date() != ticks[begin].time.date()) {
            if (begin < i) blocks.emplace_back(begin, i);
            begin = i;
        }
    }
    return blocks;
}

std::size_t apply_q1(std::vector<TickRecord>& ticks) {
    const auto before = ticks.size();
    std::erase_if(ticks, [](const TickRecord& t) { return t.bid > t.ask; });
    return before - ticks.size();
}

std::size_t apply_q2(std::vector<TickRecord>& ticks, double multiple) {
    std::vector<char> drop(ticks.size(), 0);
    for (auto [b, e] : day_blocks(ticks)) {
        std::vector<double> spreads;
        spreads.reserve(e - b);
        for (auto i = b; i < e; ++i) spreads.push_back(ticks[i].spread());
        const double med = median_of(std::move(spreads));
        if (med <= 0.0) continue;
        for (auto i = b; i < e; ++i) drop[i] = ticks[i].spread() > multiple * med;
    }
    std::size_t removed = 0, k = 0;
    std::erase_if(ticks, [&](const TickRecord&) {
        const bool d = drop[k++];
        removed += d;
        return d;
    });
    return removed;
}

std::size_t apply_q3(std::vector<TickRecord>& ticks, std::size_t window, double mads) {
    std::vector<char> drop(ticks.size(), 0);
    std::vector<double> nb;
    for (auto [b, e] : day_blocks(ticks)) {
        const std::size_t n = e - b;
        if (n < 3) continue;
        const std::size_t w = std::min(window, n);
        for (std::size_t i = 0; i < n; ++i) {
            // Centered window shifted to stay inside the day, self excluded.
            const std::size_t half = w / 2;
            std::size_t lo = i > half ? i - half : 0;
            lo = std::min(lo, n - w);
            nb.clear();
            for (std::size_t j = lo; j < lo + w; ++j)
                if (j != i) nb.push_back(ticks[b + j].mid());
            const double med = median_of(nb);
            double mad = 0.0;
            for (double x : nb) mad += std::abs(x - med);
            mad /= static_cast<double>(nb.size());
            if (mad > 0.0 && std::abs(ticks[b + i].mid() - med) > mads * mad) drop[b + i] = 1;
        }
    }
    std::size_t removed = 0, k = 0;
    std::erase_if(ticks, [&](const TickRecord&) {
        const bool d = drop[k++];
        removed += d;
        return d;
    });
    return removed;
}

std::size_t apply_q4(std::vector<TickRecord>& ticks, const std::vector<HaltInterval>& halts) {
    if (halts.empty()) return 0;
    const auto before = ticks.size();
    std::erase_if(ticks, [&](const TickRecord& t) {
        return std::any_of(halts.begin(), halts.end(), [&](const HaltInterval& h) { return t.time >= h.start && t.time < h.end; });
    });
    return before - ticks.size();
}

}  // namespace

ParsedTicks parse_ticks(std::istream& source, const TickFormat& format) {
    ParsedTicks out;
    std::string line;
    if (!std::getline(source, line)) throw ConfigError("tick source is empty: no header row");
    const auto header = csv::split(line, format.delimiter);
    auto column = [&](const std::string& name) -> std::ptrdiff_t {
        auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
            std::string_view v = h;
            while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
            while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
            return v == name;
        });
        if (it == header.end()) throw ConfigError("tick header lacks column '" + name + "'");
        return it - header.begin();
    };
    const std::ptrdiff_t asset_col = format.asset_column.empty() ? -1 : column(format.asset_column);
    const auto time_col = column(format.time_column);
    const auto bid_col = column(format.bid_column);
    const auto ask_col = column(format.ask_column);
    if (asset_col < 0 && format.default_asset.empty())
        throw ConfigError("tick format has neither an asset column nor a default asset");
    const auto needed = static_cast<std::size_t>(std::max({asset_col, time_col, bid_col, ask_col})) + 1;

    std::size_t line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        ++out.rows;
        const auto fields = csv::split(line, format.delimiter);
        auto reject = [&](const std::string& why) {
            ++out.rejected;
            out.reject_log.push_back("line " + std::to_string(line_no) + ": " + why);
        };
        if (fields.size() < needed) {
            reject("expected at least " + std::to_string(needed) + " fields");
            continue;
        }
        const auto bid = csv::to_double(fields[bid_col]);
        const auto ask = csv::to_double(fields[ask_col]);
        if (!bid || !ask) {
            reject("unparseable bid/ask");
            continue;
        }
        TickRecord rec;
        try {
            rec.time = parse_timestamp(fields[time_col], format.venue_utc_offset_ms);
        } catch (const DataError& e) {
            reject(e.what());
            continue;
        }
        rec.asset_id = asset_col >= 0 ? fields[asset_col] : format.default_asset;
        if (rec.asset_id.empty()) {
            reject("empty asset id");
            continue;
        }
        rec.bid = *bid;
        rec.ask = *ask;
        out.ticks.push_back(std::move(rec));
    }
    if (out.rows > 0 && 2 * out.rejected > out.rows)
        throw DataError(std::to_string(out.rejected) + " of " + std::to_string(out.rows) +
                        " tick rows unparseable; check the column mapping");
    return out;
}

ParsedTicks parse_ticks_file(const std::filesystem::path& path, const TickFormat& format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open tick file " + path.string());
    return parse_ticks(in, format);
}

std::vector<TickRecord> clean_ticks(std::span<const TickRecord> input, const SessionCalendar& calendar,
                                    CleaningReport* report, const CleaningParams& params) {
    CleaningReport rep;
    rep.input = input.size();
    std::vector<TickRecord> ticks(input.begin(), input.end());
    if (!ticks.empty()) {
        const auto& asset = ticks.front().asset_id;
        for (const auto& t : ticks) {
            if (t.asset_id != asset) throw ContractError("clean_ticks: ticks from several assets");
            if (!calendar.covers(t.time.date()))
                throw DataError("calendar has no coverage for " + t.time.date().to_string() + " (asset " + asset + ")");
        }
    }
    std::stable_sort(ticks.begin(), ticks.end(), [](const TickRecord& a, const TickRecord& b) { return a.time < b.time; });

    // P1
    auto before = ticks.size();
    std::erase_if(ticks, [&](const TickRecord& t) { return !calendar.in_session(t.time); });
    rep.p1_out_of_session = before - ticks.size();

    // P2
    before = ticks.size();
    std::erase_if(ticks, [](const TickRecord& t) { return !(t.bid > 0.0) || !(t.ask > 0.0); });
    rep.p2_nonpositive = before - ticks.size();

    // P3: one record per timestamp, bid and ask replaced by their medians.
    std::vector<TickRecord> merged;
    merged.reserve(ticks.size());
    for (std::size_t i = 0; i < ticks.size();) {
        std::size_t j = i + 1;
        while (j < ticks.size() && ticks[j].time == ticks[i].time) ++j;
        TickRecord rec = ticks[i];
        if (j - i > 1) {
            std::vector<double> bids, asks;
            for (auto k = i; k < j; ++k) {
                bids.push_back(ticks[k].bid);
                asks.push_back(ticks[k].ask);
            }
            rec.bid = median_of(std::move(bids));
            rec.ask = median_of(std::move(asks));
            rep.p3_merged += j - i - 1;
        }
        merged.push_back(std::move(rec));
        i = j;
    }
    ticks = std::move(merged);

    const auto halts = ticks.empty() ? std::vector<HaltInterval>{} : calendar.halts_for(ticks.front().asset_id);
    for (bool changed = true; changed;) {
        const auto q1 = apply_q1(ticks);
        const auto q2 = apply_q2(ticks, params.spread_multiple);
        const auto q3 = apply_q3(ticks, params.outlier_window, params.outlier_mads);
        const auto q4 = apply_q4(ticks, halts);
        rep.q1_crossed += q1;
        rep.q2_wide_spread += q2;
        rep.q3_outlier += q3;
        rep.q4_halted += q4;
        changed = q1 + q2 + q3 + q4 > 0;
    }
    rep.output = ticks.size();
    if (report) *report = rep;
    return ticks;
}

std::size_t QuoteSeries::size() const {
    std::size_t n = 0;
    for (const auto& s : sessions) n += s.mids.size();
    return n;
}

QuoteSeries resample(std::span<const TickRecord> ticks, std::int64_t interval_seconds,
                     std::shared_ptr<const SessionCalendar> calendar, std::vector<std::string>* log) {
    if (interval_seconds <= 0) throw ConfigError("resample: interval must be positive");
    if (!calendar) throw ContractError("resample: calendar required");
    QuoteSeries out;
    out.grid_ms = interval_seconds * kMsPerSecond;
    out.calendar = calendar;
    if (!ticks.empty()) out.asset_id = ticks.front().asset_id;

    std::size_t cursor = 0;
    for (const auto& session : calendar->sessions()) {
        while (cursor < ticks.size() && ticks[cursor].time < session.open) ++cursor;
        std::size_t end = cursor;
        while (end < ticks.size() && ticks[end].time <= session.close) ++end;
        if (end == cursor) {
            if (log) log->push_back(out.asset_id + ": no ticks on " + session.date.to_string() + ", session omitted");
            continue;
        }
        QuoteSession qs{session.date, session.open, {}};
        const auto points = static_cast<std::size_t>((session.close - session.open) / out.grid_ms) + 1;
        qs.mids.reserve(points);
        std::size_t last = cursor;  // backfill: before the first tick, use the first tick
        for (std::size_t k = 0; k < points; ++k) {
            const Timestamp g = session.open + static_cast<std::int64_t>(k) * out.grid_ms;
            while (last + 1 < end && ticks[last + 1].time <= g) ++last;
            qs.mids.push_back(ticks[last].mid());
        }
        out.sessions.push_back(std::move(qs));
        cursor = end;
    }
    return out;
}

ReturnSeries log_returns(const QuoteSeries& series, std::int64_t bar_seconds) {
    const std::int64_t bar_ms = bar_seconds * kMsPerSecond;
    if (bar_seconds <= 0 || series.grid_ms <= 0 || bar_ms % series.grid_ms != 0)
        throw ConfigError("bar length must be a positive multiple of the grid interval");
    const auto step = static_cast<std::size_t>(bar_ms / series.grid_ms);
    ReturnSeries out;
    out.asset_id = series.asset_id;
    out.bar_ms = bar_ms;
    for (std::size_t s = 0; s < series.sessions.size(); ++s) {
        const auto& qs = series.sessions[s];
        for (std::size_t k = step; k < qs.mids.size(); k += step) {
            out.starts.push_back(series.time(qs, k - step));
            out.returns.push_back(std::log(qs.mids[k]) - std::log(qs.mids[k - step]));
            out.session.push_back(static_cast<std::uint32_t>(s));
        }
    }
    return out;
}

std::map<std::string, std::vector<TickRecord>> split_by_asset(std::span<const TickRecord> ticks) {
    std::map<std::string, std::vector<TickRecord>> out;
    for (const auto& t : ticks) out[t.asset_id].push_back(t);
    return out;
}

}  // namespace newsjump
