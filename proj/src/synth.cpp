#include "newsjump/synth.hpp"

#include "newsjump/csv.hpp"
#include "newsjump/error.hpp"
#include "newsjump/rng.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace newsjump {

namespace {

std::size_t poisson(Rng& rng, double mean) {
    if (mean <= 0.0) return 0;
    const double u = uniform01(rng);
    double p = std::exp(-mean);
    double cdf = p;
    std::size_t k = 0;
    while (u > cdf && k < 10'000) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

std::vector<Date> weekday_run(Date first, std::size_t days) {
    std::vector<Date> out;
    for (Date d = first; out.size() < days; d = d + 1)
        if (d.weekday() != 0 && d.weekday() != 6) out.push_back(d);
    return out;
}

void check(const JumpDiffusionParams& p, const SimulationLayout& layout, std::size_t days, std::size_t bars) {
    if (days == 0) throw ContractError("simulate_path needs at least one day");
    if (bars == 0) throw ContractError("simulate_path needs at least one bar per day");
    if (p.stochastic_volatility) {
        const auto& sv = *p.stochastic_volatility;
        if (!(sv.long_run_variance > 0.0 && sv.initial_variance > 0.0 && sv.mean_reversion >= 0.0 &&
              sv.vol_of_vol >= 0.0))
            throw ContractError("stochastic volatility parameters out of range");
    } else if (!(p.sigma > 0.0)) {
        throw ContractError("sigma must be positive");
    }
    if (!(p.jump_intensity >= 0.0)) throw ContractError("jump intensity must be nonnegative");
    if (p.jump_stddev && !(*p.jump_stddev >= 0.0)) throw ContractError("jump stddev must be nonnegative");
    const auto& r = p.response;
    if (!(r.events_per_day >= 0.0)) throw ContractError("announcement rate must be nonnegative");
    if (!(r.probability >= 0.0 && r.probability <= 1.0)) throw ContractError("response probability must be in [0, 1]");
    if (!(r.in_session_share >= 0.0 && r.in_session_share <= 1.0))
        throw ContractError("in-session share must be in [0, 1]");
    if (r.lag_min > r.lag_max) throw ContractError("lag_min exceeds lag_max");
    if (layout.bar_seconds <= 0 || layout.grid_seconds <= 0 || layout.bar_seconds % layout.grid_seconds != 0)
        throw ContractError("grid must divide the bar");
    if (!(layout.initial_price > 0.0)) throw ContractError("initial price must be positive");
    if (layout.open_ms + static_cast<std::int64_t>(bars) * layout.bar_seconds * kMsPerSecond >= kMsPerDay)
        throw ContractError("session does not fit in one calendar day");
}

}  // namespace

SimulatedPath simulate_path(const JumpDiffusionParams& params, std::size_t days, std::size_t bars_per_day,
                            std::uint64_t seed, const SimulationLayout& layout) {
    check(params, layout, days, bars_per_day);
    const std::int64_t bar_ms = layout.bar_seconds * kMsPerSecond;
    const std::int64_t grid_ms = layout.grid_seconds * kMsPerSecond;
    const std::int64_t session_ms = bar_ms * static_cast<std::int64_t>(bars_per_day);
    const std::int64_t open = layout.open_ms;
    const std::int64_t close = open + session_ms;
    const auto dates = weekday_run(layout.first_date, days);
    auto calendar = std::make_shared<const SessionCalendar>(
        SessionCalendar::weekdays(layout.venue, open, close, dates.front(), dates.back()));

    SimulatedPath path;
    path.calendar = calendar;
    path.bar_ms = bar_ms;
    path.bars_per_day = bars_per_day;
    path.tick_size = layout.tick_size;

    const double year_ms = static_cast<double>(session_ms) * params.trading_days_per_year;
    const double dt = static_cast<double>(grid_ms) / year_ms;
    const double bar_dt = static_cast<double>(bar_ms) / year_ms;
    const double base_var = params.stochastic_volatility ? params.stochastic_volatility->long_run_variance
                                                         : params.sigma * params.sigma;
    path.bar_sigma = std::sqrt(base_var * bar_dt);
    const double jump_sd = params.jump_stddev.value_or(6.0 * path.bar_sigma);

    Rng diffusion_rng(child_seed(seed, {0}));
    Rng variance_rng(child_seed(seed, {1}));
    Rng jump_rng(child_seed(seed, {2}));
    Rng event_rng(child_seed(seed, {3}));
    Rng noise_rng(child_seed(seed, {4}));

    auto jump_size = [&] {
        if (params.fixed_jump_multiple > 0.0) {
            const double sign = uniform01(jump_rng) < 0.5 ? -1.0 : 1.0;
            return sign * params.fixed_jump_multiple * path.bar_sigma;
        }
        return params.jump_mean + jump_sd * standard_normal(jump_rng);
    };
    const std::size_t total_bars = days * bars_per_day;
    auto bar_start = [&](std::size_t b) {
        return Timestamp::at(dates[b / bars_per_day], open + static_cast<std::int64_t>(b % bars_per_day) * bar_ms);
    };
    auto add_jump = [&](std::size_t b, double size, std::optional<std::size_t> trigger) {
        const auto start = bar_start(b);
        path.jumps.push_back({start + bar_ms, start, b, size, trigger});
    };

    // Announcements, day by day.
    const auto& resp = params.response;
    const std::int64_t off_hours = kMsPerDay - session_ms - 1;
    for (std::size_t d = 0; d < days; ++d) {
        const std::size_t count = poisson(event_rng, resp.events_per_day);
        std::vector<std::int64_t> clocks;
        for (std::size_t e = 0; e < count; ++e) {
            if (uniform01(event_rng) < resp.in_session_share) {
                if (resp.align_to_grid)
                    clocks.push_back(open + static_cast<std::int64_t>(uniform_index(event_rng, bars_per_day)) * bar_ms);
                else
                    clocks.push_back(open + static_cast<std::int64_t>(
                                                uniform_index(event_rng, static_cast<std::uint64_t>(session_ms))));
            } else {
                const auto u = static_cast<std::int64_t>(uniform_index(event_rng, static_cast<std::uint64_t>(off_hours)));
                clocks.push_back(u < open ? u : close + 1 + (u - open));
            }
        }
        std::sort(clocks.begin(), clocks.end());
        for (auto c : clocks)
            path.announcements.push_back({layout.asset_id, Timestamp::at(dates[d], c), resp.label, "synth"});
    }

    // Baseline jumps, then announcement-triggered ones.
    const double per_bar = params.jump_intensity / static_cast<double>(bars_per_day);
    for (std::size_t b = 0; b < total_bars; ++b) {
        const auto n = poisson(jump_rng, per_bar);
        for (std::size_t j = 0; j < n; ++j) add_jump(b, jump_size(), std::nullopt);
    }
    for (std::size_t i = 0; i < path.announcements.size(); ++i) {
        if (!(uniform01(jump_rng) < resp.probability)) continue;
        const std::size_t lag =
            resp.lag_min + static_cast<std::size_t>(uniform_index(jump_rng, resp.lag_max - resp.lag_min + 1));
        const double size = jump_size();
        const auto t = path.announcements[i].time;
        const std::size_t d = static_cast<std::size_t>(
            std::lower_bound(dates.begin(), dates.end(), t.date()) - dates.begin());
        const auto clock = t.ms_of_day();
        std::size_t bar;
        if (clock < open)
            bar = d * bars_per_day;
        else if (clock >= close)
            bar = (d + 1) * bars_per_day;
        else
            bar = d * bars_per_day + static_cast<std::size_t>((clock - open) / bar_ms);
        bar += lag;
        if (bar >= total_bars) {
            ++path.dropped_triggers;
            continue;
        }
        add_jump(bar, size, i);
    }
    std::stable_sort(path.jumps.begin(), path.jumps.end(),
                     [](const TrueJump& a, const TrueJump& b) { return a.bar < b.bar; });
    std::vector<double> bar_jump(total_bars, 0.0);
    for (const auto& j : path.jumps) bar_jump[j.bar] += j.size;

    // Log-price on the grid; overnight the price does not move.
    const std::size_t steps_per_bar = static_cast<std::size_t>(bar_ms / grid_ms);
    const std::size_t steps = steps_per_bar * bars_per_day;
    const double noise_sd = layout.noise_ticks * layout.tick_size;
    double x = std::log(layout.initial_price);
    double v = params.stochastic_volatility ? params.stochastic_volatility->initial_variance : base_var;
    path.quotes.asset_id = layout.asset_id;
    path.quotes.grid_ms = grid_ms;
    path.quotes.calendar = calendar;
    path.quotes.sessions.reserve(days);
    for (std::size_t d = 0; d < days; ++d) {
        QuoteSession s;
        s.date = dates[d];
        s.start = Timestamp::at(dates[d], open);
        s.mids.reserve(steps + 1);
        auto observe = [&] {
            double mid = std::exp(x);
            if (noise_sd > 0.0) mid = std::max(mid + noise_sd * standard_normal(noise_rng), layout.tick_size);
            s.mids.push_back(mid);
        };
        observe();
        for (std::size_t k = 1; k <= steps; ++k) {
            const double var = std::max(v, 0.0);
            x += (params.mu - 0.5 * var) * dt + std::sqrt(var * dt) * standard_normal(diffusion_rng);
            if (params.stochastic_volatility) {
                const auto& sv = *params.stochastic_volatility;
                v += sv.mean_reversion * (sv.long_run_variance - var) * dt +
                     sv.vol_of_vol * std::sqrt(var * dt) * standard_normal(variance_rng);
            }
            if (k % steps_per_bar == 0) x += bar_jump[d * bars_per_day + k / steps_per_bar - 1];
            observe();
        }
        path.quotes.sessions.push_back(std::move(s));
    }
    return path;
}

DetectorEvaluation evaluate_detector(const SimulatedPath& path, const DetectionConfig& config) {
    const auto returns = log_returns(path.quotes, path.bar_ms / kMsPerSecond);
    const auto result = detect_jumps(returns, config);
    DetectorEvaluation ev;
    ev.threshold = result.threshold;
    ev.testable = result.testable;

    auto bar_of = [&](Timestamp start) -> std::optional<std::size_t> {
        auto it = std::lower_bound(returns.starts.begin(), returns.starts.end(), start);
        if (it == returns.starts.end() || *it != start) return std::nullopt;
        return static_cast<std::size_t>(it - returns.starts.begin());
    };
    std::vector<char> has_jump(returns.size(), 0);
    for (const auto& j : path.jumps) {
        const auto k = bar_of(j.bar_start);
        if (!k) continue;
        if (!has_jump[*k] && !std::isnan(result.sigma_hat[*k])) ++ev.true_jumps;
        has_jump[*k] = 1;
    }

    std::vector<char> testable_day;
    std::vector<char> false_day;
    for (std::size_t k = 0; k < returns.size(); ++k) {
        const auto s = returns.session[k];
        if (s >= testable_day.size()) {
            testable_day.resize(s + 1, 0);
            false_day.resize(s + 1, 0);
        }
        if (!std::isnan(result.sigma_hat[k])) testable_day[s] = 1;
    }
    for (const auto& j : result.jumps) {
        ++ev.detections;
        if (has_jump[j.bar]) {
            ++ev.detected_true;
        } else {
            ++ev.false_positives;
            false_day[returns.session[j.bar]] = 1;
        }
    }
    for (std::size_t s = 0; s < testable_day.size(); ++s) {
        ev.days += testable_day[s];
        ev.days_with_false += testable_day[s] && false_day[s];
    }
    if (ev.true_jumps > 0) ev.true_positive_rate = static_cast<double>(ev.detected_true) / static_cast<double>(ev.true_jumps);
    if (ev.days > 0) {
        ev.false_positives_per_day = static_cast<double>(ev.false_positives) / static_cast<double>(ev.days);
        ev.size = static_cast<double>(ev.days_with_false) / static_cast<double>(ev.days);
    }
    return ev;
}

void write_ticks(std::ostream& out, const SimulatedPath& path) {
    const double half = 0.5 * path.tick_size;
    out << "asset,timestamp,bid,ask\n";
    for (const auto& s : path.quotes.sessions)
        for (std::size_t k = 0; k < s.mids.size(); ++k)
            out << path.quotes.asset_id << ',' << format_timestamp(path.quotes.time(s, k)) << ','
                << csv::num(s.mids[k] - half) << ',' << csv::num(s.mids[k] + half) << '\n';
}

void write_true_jumps(std::ostream& out, const SimulatedPath& path) {
    out << "asset,bar_start,observed,size,triggered_by\n";
    for (const auto& j : path.jumps)
        out << path.quotes.asset_id << ',' << format_timestamp(j.bar_start) << ',' << format_timestamp(j.time) << ','
            << csv::num(j.size) << ',' << (j.trigger ? format_timestamp(path.announcements[*j.trigger].time) : "")
            << '\n';
}

}  // namespace newsjump
