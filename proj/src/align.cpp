#include "newsjump/align.hpp"

#include "newsjump/csv.hpp"
#include "newsjump/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace newsjump {

std::vector<Announcement> read_announcements(std::istream& in, std::int64_t venue_utc_offset_ms) {
    std::vector<Announcement> out;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::ptrdiff_t asset_col = 0, time_col = 1, class_col = 2, source_col = 3;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r" || line.front() == '#') continue;
        auto fields = csv::split(line);
        if (!header_seen) {
            header_seen = true;
            auto find = [&](std::initializer_list<const char*> names) -> std::ptrdiff_t {
                for (std::size_t i = 0; i < fields.size(); ++i)
                    for (const char* n : names)
                        if (fields[i] == n) return static_cast<std::ptrdiff_t>(i);
                return -1;
            };
            asset_col = find({"asset_id", "asset"});
            time_col = find({"timestamp", "time", "event_time"});
            class_col = find({"class", "label"});
            source_col = find({"source_id", "source"});
            if (asset_col < 0 || time_col < 0)
                throw ConfigError("announcement header must name asset_id and timestamp columns");
            continue;
        }
        auto field = [&](std::ptrdiff_t c) -> std::string {
            return c >= 0 && static_cast<std::size_t>(c) < fields.size() ? fields[static_cast<std::size_t>(c)] : std::string{};
        };
        Announcement a;
        a.asset_id = field(asset_col);
        if (a.asset_id.empty()) throw DataError("announcement line " + std::to_string(line_no) + ": empty asset id");
        a.time = parse_timestamp(field(time_col), venue_utc_offset_ms);
        a.label = field(class_col);
        a.source_id = field(source_col);
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<Announcement> read_announcements_file(const std::filesystem::path& path, std::int64_t venue_utc_offset_ms) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open announcement file " + path.string());
    return read_announcements(in, venue_utc_offset_ms);
}

void write_announcements(std::ostream& out, std::span<const Announcement> events, std::span<const std::string> metadata) {
    for (const auto& m : metadata) out << "# " << m << "\n";
    out << "asset_id,timestamp,class,source_id\n";
    for (const auto& e : events)
        out << csv::join({e.asset_id, format_timestamp(e.time), e.label, e.source_id}) << "\n";
}

TradingClock::TradingClock(const SessionCalendar& calendar, std::int64_t bar_ms, ClockMode mode)
    : bar_ms_(bar_ms), mode_(mode) {
    if (bar_ms <= 0) throw ConfigError("trading clock: bar length must be positive");
    const auto& sessions = calendar.sessions();
    opens_.reserve(sessions.size());
    closes_.reserve(sessions.size());
    coord_.reserve(sessions.size());
    std::int64_t c = 0;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        if (i > 0) c += (closes_.back() - opens_.back()) + std::min(sessions[i].open - closes_.back(), bar_ms_);
        opens_.push_back(sessions[i].open);
        closes_.push_back(sessions[i].close);
        coord_.push_back(c);
    }
}

TradingClock::Position TradingClock::locate(Timestamp t) const {
    const auto i = static_cast<std::size_t>(std::upper_bound(opens_.begin(), opens_.end(), t) - opens_.begin());
    if (i > 0 && t <= closes_[i - 1]) return {true, i - 1};
    return {false, i};
}

std::int64_t TradingClock::distance_ms(Timestamp from, Timestamp to) const {
    if (to < from) throw ContractError("capped distance requires from <= to");
    if (mode_ == ClockMode::calendar || opens_.empty()) {
        return mode_ == ClockMode::calendar ? to - from : std::min(to - from, bar_ms_);
    }
    const auto a = locate(from);
    const auto b = locate(to);
    if (a.in_session == b.in_session && a.index == b.index)
        return a.in_session ? to - from : std::min(to - from, bar_ms_);

    std::int64_t head = 0, anchor = 0;
    if (a.in_session) {
        head = closes_[a.index] - from;
        anchor = coord_[a.index] + (closes_[a.index] - opens_[a.index]);
    } else {
        // b lies strictly later, so this gap ends at a session open.
        head = std::min(opens_[a.index] - from, bar_ms_);
        anchor = coord_[a.index];
    }
    std::int64_t target = 0;
    if (b.in_session) {
        target = coord_[b.index] + (to - opens_[b.index]);
    } else {
        const auto s = b.index - 1;
        target = coord_[s] + (closes_[s] - opens_[s]) + std::min(to - closes_[s], bar_ms_);
    }
    return head + (target - anchor);
}

std::vector<Announcement> filter_confounded(std::span<const Announcement> events, double window_hours) {
    const auto window = static_cast<std::int64_t>(std::llround(window_hours * kMsPerHour));
    std::map<std::string, std::vector<std::size_t>> by_asset;
    for (std::size_t i = 0; i < events.size(); ++i) by_asset[events[i].asset_id].push_back(i);
    std::vector<char> drop(events.size(), 0);
    for (auto& [asset, idx] : by_asset) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return events[x].time < events[y].time; });
        for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
            if (events[idx[k + 1]].time - events[idx[k]].time <= window) {
                drop[idx[k]] = 1;
                drop[idx[k + 1]] = 1;
            }
        }
    }
    std::vector<Announcement> out;
    for (std::size_t i = 0; i < events.size(); ++i)
        if (!drop[i]) out.push_back(events[i]);
    return out;
}

WaitingTime forward_distance(Timestamp t, std::span<const JumpRecord> jumps, const TradingClock& clock) {
    WaitingTime w{Direction::forward, std::nullopt, 0};
    auto it = std::partition_point(jumps.begin(), jumps.end(), [&](const JumpRecord& j) { return j.end <= t; });
    if (it == jumps.end()) return w;
    w.match = static_cast<std::size_t>(it - jumps.begin());
    w.ms = it->start > t ? clock.distance_ms(t, it->start) : 0;
    return w;
}

WaitingTime backward_distance(Timestamp t, std::span<const JumpRecord> jumps, const TradingClock& clock) {
    WaitingTime w{Direction::backward, std::nullopt, 0};
    auto it = std::partition_point(jumps.begin(), jumps.end(), [&](const JumpRecord& j) { return j.end <= t; });
    if (it == jumps.begin()) return w;
    --it;
    w.match = static_cast<std::size_t>(it - jumps.begin());
    w.ms = clock.distance_ms(it->end, t);
    return w;
}

std::pair<std::optional<double>, std::optional<double>> nearest_jump_sizes(Timestamp t,
                                                                           std::span<const JumpRecord> jumps) {
    std::pair<std::optional<double>, std::optional<double>> out;
    auto it = std::partition_point(jumps.begin(), jumps.end(), [&](const JumpRecord& j) { return j.end <= t; });
    if (it != jumps.end()) out.first = it->statistic;
    if (it != jumps.begin()) out.second = std::prev(it)->statistic;
    return out;
}

}  // namespace newsjump
