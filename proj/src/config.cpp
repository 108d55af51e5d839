#include "newsjump/csv.hpp"
#include "newsjump/kvfile.hpp"
#include "newsjump/pipeline.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace newsjump {

namespace {

constexpr std::array<std::pair<Stage, const char*>, 8> kStageNames{{
    {Stage::config, "config"},
    {Stage::ingest, "ingest"},
    {Stage::detect, "detect"},
    {Stage::align, "align"},
    {Stage::reference, "reference"},
    {Stage::test, "test"},
    {Stage::report, "report"},
    {Stage::synth, "synth"},
}};

constexpr std::array<const char*, 20> kKeys{
    "data.ticks",          "data.announcements", "data.calendar",        "data.delimiter",
    "data.asset_column",   "data.time_column",   "data.bid_column",      "data.ask_column",
    "data.default_asset",  "detect.bar_minutes", "detect.grid_seconds",  "detect.alpha",
    "detect.window",       "align.confounding_hours", "align.clock",     "reference.kde",
    "reference.pooling",   "reference.ensemble", "reference.bootstrap", "reference.seed",
};
constexpr std::array<const char*, 2> kRunKeys{"run.out", "run.workers"};

std::string qualify(const std::string& key) {
    if (key.find('.') != std::string::npos) return key;
    std::string found;
    auto scan = [&](const char* k) {
        std::string_view full(k);
        if (full.substr(full.find('.') + 1) == key) found = k;
    };
    for (auto k : kKeys) scan(k);
    for (auto k : kRunKeys) scan(k);
    if (found.empty()) throw ConfigError("unknown config key '" + key + "'");
    return found;
}

template <class T>
T parse_unsigned(const std::string& key, const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected a nonnegative integer, got '" + value + "'");
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    auto v = csv::to_double(value);
    if (!v || !std::isfinite(*v)) throw ConfigError(key + ": expected a number, got '" + value + "'");
    return *v;
}

char parse_delimiter(const std::string& value) {
    if (value == "tab" || value == "\\t") return '\t';
    if (value == "comma") return ',';
    if (value == "semicolon") return ';';
    if (value == "pipe") return '|';
    if (value.size() == 1) return value[0];
    throw ConfigError("data.delimiter: expected one character or tab/comma/semicolon/pipe");
}

std::string delimiter_name(char c) {
    switch (c) {
        case '\t': return "tab";
        case ',': return "comma";
        case ';': return "semicolon";
        case '|': return "pipe";
        default: return std::string(1, c);
    }
}

std::string format_real(double v) { return csv::num(v, 15); }

}  // namespace

const char* to_string(Stage s) {
    for (const auto& [stage, name] : kStageNames)
        if (stage == s) return name;
    return "unknown";
}

std::optional<Stage> parse_stage(std::string_view name) {
    for (const auto& [stage, n] : kStageNames)
        if (name == n) return stage;
    return std::nullopt;
}

std::filesystem::path RunConfig::resolve(const std::string& p) const {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : (base_dir / path).lexically_normal();
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    auto dir = path.parent_path();
    if (dir.empty()) dir = ".";
    return parse(text.str(), dir);
}

RunConfig RunConfig::parse(const std::string& text, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    cfg.base_dir = base_dir;
    const auto kv = KeyValueFile::parse(text);
    bool ticks_seen = false, events_seen = false;
    for (const auto& e : kv.entries()) {
        const auto key = qualify(e.key);
        try {
            if (key == "data.ticks") {
                if (!ticks_seen) cfg.raw_ticks_.clear();
                ticks_seen = true;
                for (auto& p : split_list(e.value)) cfg.raw_ticks_.push_back(p);
                cfg.tick_files.clear();
                for (auto& p : cfg.raw_ticks_) cfg.tick_files.push_back(cfg.resolve(p));
            } else if (key == "data.announcements") {
                if (!events_seen) cfg.raw_announcements_.clear();
                events_seen = true;
                for (auto& p : split_list(e.value)) cfg.raw_announcements_.push_back(p);
                cfg.announcement_files.clear();
                for (auto& p : cfg.raw_announcements_) cfg.announcement_files.push_back(cfg.resolve(p));
            } else {
                cfg.set(key, e.value);
            }
        } catch (const ConfigError& err) {
            throw ConfigError("line " + std::to_string(e.line) + ": " + err.what());
        }
    }
    return cfg;
}

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
    const auto key = qualify(raw_key);
    const auto value = trim_copy(raw_value);
    if (key == "data.ticks") {
        raw_ticks_ = split_list(value);
        tick_files.clear();
        for (auto& p : raw_ticks_) tick_files.push_back(resolve(p));
    } else if (key == "data.announcements") {
        raw_announcements_ = split_list(value);
        announcement_files.clear();
        for (auto& p : raw_announcements_) announcement_files.push_back(resolve(p));
    } else if (key == "data.calendar") {
        raw_calendar_ = value;
        calendar_file = resolve(value);
    } else if (key == "data.delimiter") {
        tick_format.delimiter = parse_delimiter(value);
    } else if (key == "data.asset_column") {
        tick_format.asset_column = value;
    } else if (key == "data.time_column") {
        tick_format.time_column = value;
    } else if (key == "data.bid_column") {
        tick_format.bid_column = value;
    } else if (key == "data.ask_column") {
        tick_format.ask_column = value;
    } else if (key == "data.default_asset") {
        tick_format.default_asset = value;
    } else if (key == "detect.bar_minutes") {
        const double minutes = parse_real(key, value);
        const double seconds = minutes * 60.0;
        if (!(seconds > 0.0) || std::abs(seconds - std::round(seconds)) > 1e-9)
            throw ConfigError(key + ": must be a positive whole number of seconds");
        bar_seconds = static_cast<std::int64_t>(std::llround(seconds));
    } else if (key == "detect.grid_seconds") {
        grid_seconds = parse_unsigned<std::int64_t>(key, value);
    } else if (key == "detect.alpha") {
        detection.alpha = parse_real(key, value);
    } else if (key == "detect.window") {
        detection.window = parse_unsigned<std::size_t>(key, value);
    } else if (key == "align.confounding_hours") {
        confounding_hours = parse_real(key, value);
    } else if (key == "align.clock") {
        if (value == "trading") clock = ClockMode::trading;
        else if (value == "calendar") clock = ClockMode::calendar;
        else throw ConfigError(key + ": expected trading or calendar");
    } else if (key == "reference.kde") {
        if (value == "auto") kde = KdeMode::automatic;
        else if (value == "atoms") kde = KdeMode::atoms;
        else if (value == "kde") kde = KdeMode::kde;
        else throw ConfigError(key + ": expected auto, atoms or kde");
    } else if (key == "reference.pooling") {
        if (value == "per_asset") pooling = Pooling::per_asset;
        else if (value == "pooled") pooling = Pooling::pooled;
        else throw ConfigError(key + ": expected per_asset or pooled");
    } else if (key == "reference.ensemble") {
        ensemble = parse_unsigned<std::size_t>(key, value);
    } else if (key == "reference.bootstrap") {
        bootstrap = parse_unsigned<std::size_t>(key, value);
    } else if (key == "reference.seed") {
        seed = parse_unsigned<std::uint64_t>(key, value);
    } else if (key == "run.out") {
        raw_out_ = value;
        out = resolve(value);
    } else if (key == "run.workers") {
        workers = parse_unsigned<std::size_t>(key, value);
    } else {
        throw ConfigError("unknown config key '" + raw_key + "'");
    }
}

void RunConfig::validate() const {
    if (!(detection.alpha > 0.0 && detection.alpha < 1.0)) throw ConfigError("detect.alpha must lie in (0, 1)");
    if (detection.window < 3) throw ConfigError("detect.window must be at least 3");
    if (grid_seconds <= 0) throw ConfigError("detect.grid_seconds must be positive");
    if (bar_seconds <= 0 || bar_seconds % grid_seconds != 0)
        throw ConfigError("detect.bar_minutes must be a positive multiple of the grid interval");
    if (!(confounding_hours >= 0.0)) throw ConfigError("align.confounding_hours must be nonnegative");
    if (bootstrap < 100) throw ConfigError("reference.bootstrap must be at least 100");
    if (tick_files.empty()) throw ConfigError("data.ticks: no tick file given");
    if (announcement_files.empty()) throw ConfigError("data.announcements: no announcement file given");
    if (calendar_file.empty()) throw ConfigError("data.calendar: no calendar file given");
    auto must_exist = [](const std::filesystem::path& p, const char* what) {
        if (!std::filesystem::is_regular_file(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
    };
    for (const auto& p : tick_files) must_exist(p, "tick file");
    must_exist(calendar_file, "calendar file");
    for (const auto& p : announcement_files) {
        must_exist(p, "announcement file");
        std::vector<Announcement> events;
        try {
            events = read_announcements_file(p);
        } catch (const Error& e) {
            throw ConfigError("announcement file " + p.string() + ": " + e.what());
        }
        if (events.empty()) throw ConfigError("announcement file has no events: " + p.string());
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
    std::vector<std::pair<std::string, std::string>> e;
    auto joined = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
        return s;
    };
    e.emplace_back("data.ticks", joined(raw_ticks_));
    e.emplace_back("data.announcements", joined(raw_announcements_));
    e.emplace_back("data.calendar", raw_calendar_);
    e.emplace_back("data.delimiter", delimiter_name(tick_format.delimiter));
    e.emplace_back("data.asset_column", tick_format.asset_column);
    e.emplace_back("data.time_column", tick_format.time_column);
    e.emplace_back("data.bid_column", tick_format.bid_column);
    e.emplace_back("data.ask_column", tick_format.ask_column);
    e.emplace_back("data.default_asset", tick_format.default_asset);
    e.emplace_back("detect.bar_minutes", format_real(static_cast<double>(bar_seconds) / 60.0));
    e.emplace_back("detect.grid_seconds", std::to_string(grid_seconds));
    e.emplace_back("detect.alpha", format_real(detection.alpha));
    e.emplace_back("detect.window", std::to_string(detection.window));
    e.emplace_back("align.confounding_hours", format_real(confounding_hours));
    e.emplace_back("align.clock", clock == ClockMode::trading ? "trading" : "calendar");
    e.emplace_back("reference.kde", kde == KdeMode::automatic ? "auto" : kde == KdeMode::atoms ? "atoms" : "kde");
    e.emplace_back("reference.pooling", pooling == Pooling::per_asset ? "per_asset" : "pooled");
    e.emplace_back("reference.ensemble", std::to_string(ensemble));
    e.emplace_back("reference.bootstrap", std::to_string(bootstrap));
    e.emplace_back("reference.seed", std::to_string(seed));
    e.emplace_back("run.out", raw_out_);
    return e;
}

AnalysisOptions AnalysisOptions::from(const RunConfig& c) {
    AnalysisOptions o;
    o.bar_seconds = c.bar_seconds;
    o.detection = c.detection;
    o.confounding_hours = c.confounding_hours;
    o.clock = c.clock;
    o.kde = c.kde;
    o.pooling = c.pooling;
    o.ensemble = c.ensemble;
    o.bootstrap = c.bootstrap;
    o.seed = c.seed;
    o.workers = c.workers;
    return o;
}

}  // namespace newsjump
