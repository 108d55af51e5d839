#pragma once

#include "newsjump/align.hpp"
#include "newsjump/calendar.hpp"
#include "newsjump/ingest.hpp"
#include "newsjump/jumps.hpp"
#include "newsjump/time.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace newsjump {

/// Heston-type variance process dv = kappa (theta - v) dt + xi sqrt(v) dW,
/// annualised, independent of the price shock.
struct StochasticVolatility {
    double mean_reversion = 5.0;
    double vol_of_vol = 0.3;
    double long_run_variance = 0.0225;
    double initial_variance = 0.0225;
};

/// Synthetic announcements and the jumps they trigger.
struct AnnouncementResponse {
    /// Expected announcements per trading day.
    double events_per_day = 0.0;
    /// Share of announcements placed inside the session; the rest fall
    /// uniformly in the off-session part of the calendar day.
    double in_session_share = 1.0;
    /// Place in-session announcements on bar starts.
    bool align_to_grid = false;
    /// Probability that an announcement triggers a jump.
    double probability = 0.0;
    /// Triggered jump goes lag bars after the bar containing the announcement
    /// (the first bar after it when outside the session); lag is uniform on
    /// [lag_min, lag_max].
    std::size_t lag_min = 0;
    std::size_t lag_max = 0;
    std::string label = "scheduled";
};

struct JumpDiffusionParams {
    /// Drift per year.
    double mu = 0.0;
    /// Diffusion volatility per sqrt(year), trading time.
    double sigma = 0.15;
    std::optional<StochasticVolatility> stochastic_volatility;
    /// Baseline jumps per trading day.
    double jump_intensity = 0.0;
    double jump_mean = 0.0;
    /// Jump-size stddev in log terms; defaults to 6 bar diffusion scales.
    std::optional<double> jump_stddev;
    /// When positive, every jump is +/- this many bar diffusion scales
    /// (random sign) instead of Gaussian.
    double fixed_jump_multiple = 0.0;
    AnnouncementResponse response;
    double trading_days_per_year = 252.0;
};

/// Calendar, grid and observation settings of a simulation.
struct SimulationLayout {
    std::string asset_id = "SYN";
    std::string venue = "SYNTH";
    Date first_date = Date::from_ymd(2006, 1, 2);
    std::int64_t open_ms = 9 * kMsPerHour;
    std::int64_t bar_seconds = 900;
    /// Simulation step; must divide the bar.
    std::int64_t grid_seconds = 900;
    double initial_price = 100.0;
    /// Stddev of additive iid observation noise, in ticks.
    double noise_ticks = 0.0;
    double tick_size = 0.01;
};

struct TrueJump {
    /// First grid time observing the jumped price, the end of its bar.
    Timestamp time;
    Timestamp bar_start;
    /// Index of the bar over the whole path.
    std::size_t bar = 0;
    /// Log-price jump.
    double size = 0.0;
    /// Index into SimulatedPath::announcements when triggered by one.
    std::optional<std::size_t> trigger;
};

struct SimulatedPath {
    std::shared_ptr<const SessionCalendar> calendar;
    /// Observed mid prices on the simulation grid.
    QuoteSeries quotes;
    std::int64_t bar_ms = 0;
    std::size_t bars_per_day = 0;
    /// Diffusion scale of one bar (log terms).
    double bar_sigma = 0.0;
    double tick_size = 0.01;
    std::vector<TrueJump> jumps;
    std::vector<Announcement> announcements;
    /// Triggered jumps that would have fallen after the last bar.
    std::size_t dropped_triggers = 0;
};

/// Euler simulation on the grid over `days` weekday sessions of
/// `bars_per_day` bars each. Jumps per bar are Poisson with the baseline
/// rate, plus announcement-triggered jumps. Deterministic in `seed`.
SimulatedPath simulate_path(const JumpDiffusionParams& params, std::size_t days, std::size_t bars_per_day,
                            std::uint64_t seed, const SimulationLayout& layout = {});

struct DetectorEvaluation {
    std::size_t days = 0;
    std::size_t detections = 0;
    /// True jumps in testable bars.
    std::size_t true_jumps = 0;
    std::size_t detected_true = 0;
    std::size_t false_positives = 0;
    /// Days with at least one false detection.
    std::size_t days_with_false = 0;
    double true_positive_rate = 0.0;
    double false_positives_per_day = 0.0;
    /// Share of days with at least one false detection.
    double size = 0.0;
    double threshold = 0.0;
    std::size_t testable = 0;
};

/// A detection is a true positive when its bar contains a true jump. Days are
/// those with at least one testable bar.
DetectorEvaluation evaluate_detector(const SimulatedPath& path, const DetectionConfig& config);

/// Grid prices as ticks with a one-tick spread around the mid.
void write_ticks(std::ostream& out, const SimulatedPath& path);
void write_true_jumps(std::ostream& out, const SimulatedPath& path);

}  // namespace newsjump
