#include "newsjump/jumps.hpp"

#include "newsjump/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace newsjump {

std::vector<double> bipower_volatility(std::span<const double> returns, std::size_t window) {
    if (window < 3) throw ConfigError("bipower window must be at least 3 bars");
    const std::size_t n = returns.size();
    std::vector<double> sigma(n, std::numeric_limits<double>::quiet_NaN());
    const double scale = 1.0 / static_cast<double>(window - 2);
    for (std::size_t k = window; k < n; ++k) {
        double sum = 0.0;
        for (std::size_t j = k - window + 2; j <= k - 1; ++j) sum += std::abs(returns[j]) * std::abs(returns[j - 1]);
        sigma[k] = std::sqrt(sum * scale);
    }
    return sigma;
}

StatisticSeries jump_statistic(std::span<const double> returns, std::span<const double> sigma_hat) {
    if (returns.size() != sigma_hat.size()) throw ContractError("jump_statistic: length mismatch");
    StatisticSeries out;
    out.values.assign(returns.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < returns.size(); ++k) {
        const double s = sigma_hat[k];
        if (std::isnan(s)) continue;
        if (s > 0.0) {
            out.values[k] = returns[k] / s;
        } else if (returns[k] != 0.0) {
            out.degenerate.push_back(k);
        }
    }
    return out;
}

double detection_threshold(std::size_t n, double alpha) {
    if (n < 2) throw ContractError("detection_threshold: n must be at least 2");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ContractError("detection_threshold: alpha must lie in [0, 1)");
    const double c = std::sqrt(2.0 / std::numbers::pi);
    const double log_n = std::log(static_cast<double>(n));
    const double root = std::sqrt(2.0 * log_n);
    const double cn = root / c - (std::log(std::numbers::pi) + std::log(log_n)) / (2.0 * c * root);
    const double sn = 1.0 / (c * root);
    if (alpha == 0.0) return std::numeric_limits<double>::infinity();
    return cn + sn * -std::log(-std::log1p(-alpha));
}

DetectionResult detect_jumps(const ReturnSeries& returns, const DetectionConfig& config) {
    if (!(config.alpha >= 0.0 && config.alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
    DetectionResult out;
    out.sigma_hat = bipower_volatility(returns.returns, config.window);
    auto stat = jump_statistic(returns.returns, out.sigma_hat);
    out.statistic = std::move(stat.values);
    out.degenerate = stat.degenerate.size();
    if (out.degenerate > 0)
        out.warnings.push_back(returns.asset_id + ": " + std::to_string(out.degenerate) +
                               " bars with zero volatility and nonzero return excluded");
    if (returns.size() < config.window + 1) {
        out.warnings.push_back(returns.asset_id + ": " + std::to_string(returns.size()) +
                               " bars, need more than the bipower window; no jumps tested");
        return out;
    }
    for (double l : out.statistic) out.testable += !std::isnan(l);
    if (out.testable < 2) {
        out.warnings.push_back(returns.asset_id + ": fewer than 2 testable bars");
        return out;
    }
    out.threshold = detection_threshold(out.testable, config.alpha);
    for (std::size_t k = 0; k < out.statistic.size(); ++k) {
        const double l = out.statistic[k];
        if (std::isnan(l) || !(std::abs(l) > out.threshold)) continue;
        out.jumps.push_back({returns.asset_id, returns.starts[k], returns.starts[k] + returns.bar_ms, std::abs(l),
                             l < 0.0 ? -1 : 1, out.sigma_hat[k], k});
    }
    return out;
}

std::vector<std::int64_t> default_signature_frequencies() {
    std::vector<std::int64_t> f{10};
    for (int m = 1; m <= 15; ++m) f.push_back(60 * m);
    return f;
}

std::vector<SignaturePoint> signature_curves(std::span<const QuoteSeries> series,
                                             std::span<const std::int64_t> frequencies_seconds) {
    std::vector<SignaturePoint> out;
    for (const auto seconds : frequencies_seconds) {
        SignaturePoint point{seconds, 0.0, 0.0, 0};
        for (const auto& qs : series) {
            const std::int64_t ms = seconds * kMsPerSecond;
            if (ms < qs.grid_ms) throw ConfigError("signature frequency " + std::to_string(seconds) + "s is below the grid interval");
            if (ms % qs.grid_ms != 0)
                throw ConfigError("signature frequency " + std::to_string(seconds) + "s is not a multiple of the grid interval");
            const auto step = static_cast<std::size_t>(ms / qs.grid_ms);
            for (const auto& session : qs.sessions) {
                double rv = 0.0, bv = 0.0, prev = 0.0;
                std::size_t bars = 0;
                for (std::size_t k = step; k < session.mids.size(); k += step) {
                    const double r = std::log(session.mids[k]) - std::log(session.mids[k - step]);
                    rv += r * r;
                    if (bars > 0) bv += std::abs(r) * std::abs(prev);
                    prev = r;
                    ++bars;
                }
                if (bars == 0) continue;
                point.mean_rv += rv;
                point.mean_bv += 0.5 * std::numbers::pi * bv;
                ++point.days;
            }
        }
        if (point.days > 0) {
            point.mean_rv /= static_cast<double>(point.days);
            point.mean_bv /= static_cast<double>(point.days);
        }
        out.push_back(point);
    }
    return out;
}

}  // namespace newsjump
