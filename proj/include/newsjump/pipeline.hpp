#pragma once

#include "newsjump/align.hpp"
#include "newsjump/calendar.hpp"
#include "newsjump/error.hpp"
#include "newsjump/ingest.hpp"
#include "newsjump/jumps.hpp"
#include "newsjump/reference.hpp"
#include "newsjump/stats.hpp"
#include "newsjump/synth.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace newsjump {

enum class Stage { config = 0, ingest, detect, align, reference, test, report, synth };

const char* to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view name);

/// Failure of one pipeline stage; files written by earlier stages are kept.
class StageError : public Error {
public:
    StageError(Stage stage, const std::string& what)
        : Error(std::string(to_string(stage)) + ": " + what), stage_(stage) {}
    Stage stage() const { return stage_; }

private:
    Stage stage_;
};

/// Run configuration: a sectioned key-value file, overridable key by key.
///
///   [data]      ticks, announcements (repeatable or comma lists), calendar,
///               delimiter, asset_column, time_column, bid_column,
///               ask_column, default_asset
///   [detect]    bar_minutes, grid_seconds, alpha, window
///   [align]     confounding_hours, clock (trading | calendar)
///   [reference] kde (auto | atoms | kde), pooling (per_asset | pooled),
///               ensemble (0 = empirical count), bootstrap, seed
///   [run]       out, workers (0 = all cores)
///
/// Relative paths resolve against the directory of the config file.
struct RunConfig {
    std::vector<std::filesystem::path> tick_files;
    std::vector<std::filesystem::path> announcement_files;
    std::filesystem::path calendar_file;
    TickFormat tick_format;
    std::int64_t bar_seconds = 900;
    std::int64_t grid_seconds = 10;
    DetectionConfig detection;
    double confounding_hours = 6.0;
    ClockMode clock = ClockMode::trading;
    KdeMode kde = KdeMode::automatic;
    Pooling pooling = Pooling::per_asset;
    std::size_t ensemble = 0;
    std::size_t bootstrap = kDefaultBootstrapCopies;
    std::uint64_t seed = 1;
    std::filesystem::path out = "out";
    std::size_t workers = 0;
    std::filesystem::path base_dir = ".";

    static RunConfig load(const std::filesystem::path& path);
    static RunConfig parse(const std::string& text, const std::filesystem::path& base_dir = ".");
    /// Sets one key ("section.key" or a bare key that is unique across
    /// sections). Throws ConfigError for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    /// Checks ranges and that every referenced file exists; an announcement
    /// file without events is an error.
    void validate() const;
    /// Canonical key-value listing (relative paths kept as given).
    std::vector<std::pair<std::string, std::string>> entries() const;

private:
    std::vector<std::string> raw_ticks_;
    std::vector<std::string> raw_announcements_;
    std::string raw_calendar_;
    std::string raw_out_ = "out";
    std::filesystem::path resolve(const std::string& p) const;
};

struct IngestResult {
    std::shared_ptr<const SessionCalendar> calendar;
    std::map<std::string, QuoteSeries> quotes;
    std::map<std::string, CleaningReport> cleaning;
    std::size_t rows = 0;
    std::size_t rejected = 0;
    std::vector<std::string> reject_log;
    std::vector<std::string> log;
};

IngestResult ingest_data(const RunConfig& config);

struct AnalysisOptions {
    std::int64_t bar_seconds = 900;
    DetectionConfig detection;
    double confounding_hours = 6.0;
    ClockMode clock = ClockMode::trading;
    KdeMode kde = KdeMode::automatic;
    Pooling pooling = Pooling::per_asset;
    std::size_t ensemble = 0;
    std::size_t bootstrap = kDefaultBootstrapCopies;
    std::uint64_t seed = 1;
    std::size_t workers = 0;
    bool signature = true;

    static AnalysisOptions from(const RunConfig& config);
};

struct WaitingTimeRow {
    Announcement event;
    bool confounded = false;
    std::array<WaitingTime, 2> wait;
    std::array<std::optional<double>, 2> matched_size;
};

struct DirectionResult {
    Direction direction = Direction::forward;
    std::size_t events = 0;
    std::size_t censored = 0;
    std::size_t reference_events = 0;
    std::size_t reference_censored = 0;
    double median_emp = 0.0;
    double median_ref = 0.0;
    double mean_emp = 0.0;
    double mean_ref = 0.0;
    BootstrapResult boot_median;
    BootstrapResult boot_mean;
    /// Empty when either sample has fewer than two values.
    std::optional<WelchResult> welch;

    std::size_t size_emp = 0;
    std::size_t size_ref = 0;
    double size_mean_emp = 0.0;
    double size_mean_ref = 0.0;
    double size_median_emp = 0.0;
    double size_median_ref = 0.0;
    std::optional<WelchResult> size_welch;
};

struct GroupResult {
    /// "all" or "filtered" (confounded events removed).
    std::string panel;
    std::string label;
    std::string venue;
    std::size_t events = 0;
    std::uint64_t welch_seed = 0;
    std::uint64_t bootstrap_seed = 0;
    std::size_t ensemble_copies = 0;
    std::size_t bootstrap_copies = 0;
    std::map<std::string, std::size_t> counts;
    std::map<std::string, std::string> distributions;
    /// First Welch ensemble copy, kept for serialisation.
    ReferenceSample example;
    std::array<DirectionResult, 2> directions;
};

struct SeasonalityBucket {
    std::int64_t offset_minutes = 0;
    std::size_t count = 0;
    double share = 0.0;
};

/// Half-hour buckets from the session open; a jump is placed by its bar
/// start. Throws ContractError on an empty jump set.
std::vector<SeasonalityBucket> summarize_jump_seasonality(std::span<const JumpRecord> jumps,
                                                          const SessionCalendar& calendar);

struct AnalysisResult {
    std::map<std::string, DetectionResult> detection;
    std::vector<SignaturePoint> signature;
    std::vector<SeasonalityBucket> seasonality;
    std::vector<WaitingTimeRow> waiting;
    std::vector<GroupResult> groups;
    std::size_t events_read = 0;
    std::size_t events_without_prices = 0;
    std::size_t events_outside_calendar = 0;
    std::size_t events_confounded = 0;
    std::vector<std::string> warnings;
};

using StageCallback = std::function<void(Stage, const AnalysisResult&)>;

/// Runs detect through test on in-memory data, stopping after `through`.
/// `on_stage` is called as each stage completes. Throws StageError.
AnalysisResult analyse(const std::shared_ptr<const SessionCalendar>& calendar,
                       const std::map<std::string, QuoteSeries>& quotes, std::span<const Announcement> announcements,
                       const AnalysisOptions& options, Stage through = Stage::test,
                       const StageCallback& on_stage = {});

struct RunSummary {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

/// File-based pipeline: ingest and every later stage up to `through`, with
/// each stage's outputs written to the output directory as it completes.
/// A manifest is always written last. Throws StageError.
RunSummary run_pipeline(const RunConfig& config, Stage through);

/// Settings of the bundled synthetic dataset.
struct SyntheticDataset {
    JumpDiffusionParams params;
    SimulationLayout layout;
    std::size_t days = 250;
    std::size_t bars_per_day = 34;
    std::uint64_t seed = 1;

    SyntheticDataset();
};

/// Writes ticks.csv, announcements.csv, calendar.txt, true_jumps.csv and a
/// config.ini that runs the pipeline on them.
RunSummary write_synthetic_dataset(const std::filesystem::path& dir, const SyntheticDataset& dataset);

}  // namespace newsjump
