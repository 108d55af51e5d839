#pragma once

#include "newsjump/ingest.hpp"
#include "newsjump/time.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace newsjump {

struct DetectionConfig {
    /// Significance level; 0 disables detection (infinite threshold).
    double alpha = 0.01;
    /// Bipower window K in bars.
    std::size_t window = 156;
};

/// A bar [start, end) flagged as containing a jump.
struct JumpRecord {
    std::string asset_id;
    Timestamp start;
    Timestamp end;
    /// |L| of the bar.
    double statistic = 0.0;
    int sign = 1;
    double sigma_hat = 0.0;
    std::size_t bar = 0;
};

/// Instantaneous volatility from trailing bipower products:
/// sigma_hat(k)^2 = 1/(K-2) * sum_{j=k-K+2}^{k-1} |r_j| |r_{j-1}|.
///
/// Bars with fewer than K earlier returns get NaN. Throws ConfigError for K < 3.
std::vector<double> bipower_volatility(std::span<const double> returns, std::size_t window);

struct StatisticSeries {
    /// r_k / sigma_hat(k); NaN where undefined.
    std::vector<double> values;
    /// Bars with sigma_hat == 0 but a nonzero return.
    std::vector<std::size_t> degenerate;
};

StatisticSeries jump_statistic(std::span<const double> returns, std::span<const double> sigma_hat);

/// |L| rejection threshold C_n + S_n * (-log(-log(1 - alpha))) for n tested bars.
double detection_threshold(std::size_t n, double alpha);

struct DetectionResult {
    std::vector<JumpRecord> jumps;
    std::vector<double> sigma_hat;
    std::vector<double> statistic;
    std::size_t testable = 0;
    std::size_t degenerate = 0;
    double threshold = 0.0;
    std::vector<std::string> warnings;
};

/// Flags every testable bar whose |L| exceeds the threshold for this asset's
/// testable-bar count. Jumps come back sorted by start.
DetectionResult detect_jumps(const ReturnSeries& returns, const DetectionConfig& config);

struct SignaturePoint {
    std::int64_t seconds = 0;
    double mean_rv = 0.0;
    double mean_bv = 0.0;
    std::size_t days = 0;
};

/// 10 seconds, then 1 through 15 minutes.
std::vector<std::int64_t> default_signature_frequencies();

/// Daily realized variance sum r^2 and bipower variation (pi/2) sum |r_j||r_{j-1}|
/// averaged over all asset-days, per sampling frequency. A trailing partial
/// bar is dropped; a one-bar day has BV 0.
std::vector<SignaturePoint> signature_curves(std::span<const QuoteSeries> series,
                                             std::span<const std::int64_t> frequencies_seconds);

}  // namespace newsjump
