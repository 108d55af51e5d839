#include "newsjump/pipeline.hpp"

#include "newsjump/parallel.hpp"
#include "newsjump/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace newsjump {

IngestResult ingest_data(const RunConfig& config) {
    IngestResult r;
    auto calendar = std::make_shared<const SessionCalendar>(SessionCalendar::load(config.calendar_file));
    r.calendar = calendar;
    auto format = config.tick_format;
    format.venue_utc_offset_ms = calendar->utc_offset_ms();

    std::vector<TickRecord> ticks;
    for (const auto& file : config.tick_files) {
        auto parsed = parse_ticks_file(file, format);
        r.rows += parsed.rows;
        r.rejected += parsed.rejected;
        for (auto& line : parsed.reject_log) r.reject_log.push_back(file.filename().string() + " " + line);
        ticks.insert(ticks.end(), std::make_move_iterator(parsed.ticks.begin()),
                     std::make_move_iterator(parsed.ticks.end()));
    }
    for (auto& [asset, asset_ticks] : split_by_asset(ticks)) {
        CleaningReport report;
        const auto clean = clean_ticks(asset_ticks, *calendar, &report);
        r.cleaning[asset] = report;
        auto series = resample(clean, config.grid_seconds, calendar, &r.log);
        series.asset_id = asset;
        if (series.sessions.empty()) {
            r.log.push_back(asset + ": no ticks survive cleaning, asset dropped");
            continue;
        }
        r.quotes.emplace(asset, std::move(series));
    }
    if (r.quotes.empty()) throw DataError("no asset has usable tick data");
    return r;
}

std::vector<SeasonalityBucket> summarize_jump_seasonality(std::span<const JumpRecord> jumps,
                                                          const SessionCalendar& calendar) {
    if (jumps.empty()) throw ContractError("jump seasonality needs at least one jump");
    constexpr std::int64_t bucket_ms = 30 * kMsPerMinute;
    const auto buckets = static_cast<std::size_t>((calendar.session_length_ms() + bucket_ms - 1) / bucket_ms);
    std::vector<SeasonalityBucket> out(std::max<std::size_t>(buckets, 1));
    for (std::size_t b = 0; b < out.size(); ++b) out[b].offset_minutes = static_cast<std::int64_t>(b) * 30;
    for (const auto& j : jumps) {
        const auto offset = j.start.ms_of_day() - calendar.open_ms();
        const auto b = std::clamp<std::int64_t>(offset / bucket_ms, 0, static_cast<std::int64_t>(out.size()) - 1);
        ++out[static_cast<std::size_t>(b)].count;
    }
    for (auto& b : out) b.share = static_cast<double>(b.count) / static_cast<double>(jumps.size());
    return out;
}

namespace {

struct DirectionSample {
    std::vector<double> hours;
    std::vector<double> sizes;
    std::size_t censored = 0;
};

struct ReferenceDistances {
    std::array<DirectionSample, 2> dir;
};

// Waiting times of every generated timestamp to the jumps of its asset.
ReferenceDistances reference_distances(const ReferenceSample& sample,
                                       const std::map<std::string, DetectionResult>& detection,
                                       const TradingClock& clock) {
    ReferenceDistances out;
    for (const auto& [asset, times] : sample.times) {
        const auto& jumps = detection.at(asset).jumps;
        for (const auto& t : times) {
            const WaitingTime w[2] = {forward_distance(t, jumps, clock), backward_distance(t, jumps, clock)};
            for (int d = 0; d < 2; ++d) {
                auto& s = out.dir[d];
                if (w[d].censored()) {
                    ++s.censored;
                    continue;
                }
                s.hours.push_back(w[d].hours());
                s.sizes.push_back(jumps[*w[d].match].statistic);
            }
        }
    }
    return out;
}

double mean_of(std::span<const double> v) {
    return v.empty() ? std::numeric_limits<double>::quiet_NaN() : compute_statistic(v, Statistic::mean);
}
double median_of(std::span<const double> v) {
    return v.empty() ? std::numeric_limits<double>::quiet_NaN() : compute_statistic(v, Statistic::median);
}

std::optional<WelchResult> maybe_welch(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2 || y.size() < 2) return std::nullopt;
    return welch_u_test(x, y);
}

BootstrapResult empty_bootstrap(Statistic s) {
    BootstrapResult r;
    r.statistic = s;
    r.empirical = r.reference = r.p_left = r.p_right = std::numeric_limits<double>::quiet_NaN();
    return r;
}

}  // namespace

AnalysisResult analyse(const std::shared_ptr<const SessionCalendar>& calendar,
                       const std::map<std::string, QuoteSeries>& quotes, std::span<const Announcement> announcements,
                       const AnalysisOptions& options, Stage through, const StageCallback& on_stage) {
    AnalysisResult result;
    Stage stage = Stage::detect;
    auto finish = [&](Stage s) {
        if (on_stage) on_stage(s, result);
        return s >= through;
    };
    try {
        if (!calendar) throw ContractError("analysis needs a calendar");
        const std::int64_t bar_ms = options.bar_seconds * kMsPerSecond;

        // detect
        std::vector<const QuoteSeries*> series;
        for (const auto& [_, q] : quotes) series.push_back(&q);
        std::vector<DetectionResult> detections(series.size());
        parallel_for(series.size(), options.workers, [&](std::size_t i) {
            detections[i] = detect_jumps(log_returns(*series[i], options.bar_seconds), options.detection);
        });
        std::vector<JumpRecord> all_jumps;
        for (std::size_t i = 0; i < series.size(); ++i) {
            for (const auto& w : detections[i].warnings) result.warnings.push_back(series[i]->asset_id + ": " + w);
            all_jumps.insert(all_jumps.end(), detections[i].jumps.begin(), detections[i].jumps.end());
            result.detection.emplace(series[i]->asset_id, std::move(detections[i]));
        }
        if (options.signature && !series.empty()) {
            const auto grid_s = series.front()->grid_ms / kMsPerSecond;
            std::vector<std::int64_t> freqs;
            for (auto f : default_signature_frequencies())
                if (f >= grid_s && f % grid_s == 0) freqs.push_back(f);
            std::vector<QuoteSeries> copies;
            for (const auto* q : series) copies.push_back(*q);
            result.signature = signature_curves(copies, freqs);
        }
        if (all_jumps.empty())
            result.warnings.push_back("no jumps detected; seasonality table left empty");
        else
            result.seasonality = summarize_jump_seasonality(all_jumps, *calendar);
        if (finish(Stage::detect)) return result;

        // align
        stage = Stage::align;
        result.events_read = announcements.size();
        std::vector<Announcement> events;
        for (const auto& e : announcements) {
            if (!quotes.contains(e.asset_id)) {
                ++result.events_without_prices;
            } else if (!calendar->covers(e.time.date())) {
                ++result.events_outside_calendar;
            } else {
                events.push_back(e);
            }
        }
        if (result.events_without_prices)
            result.warnings.push_back(std::to_string(result.events_without_prices) +
                                      " announcements dropped: asset has no price data");
        if (result.events_outside_calendar)
            result.warnings.push_back(std::to_string(result.events_outside_calendar) +
                                      " announcements dropped: outside the calendar range");
        if (events.empty()) throw DataError("no announcement matches an asset with price data inside the calendar");
        std::stable_sort(events.begin(), events.end(), [](const Announcement& a, const Announcement& b) {
            return std::tie(a.asset_id, a.time) < std::tie(b.asset_id, b.time);
        });
        const auto survivors = filter_confounded(events, options.confounding_hours);
        const TradingClock clock(*calendar, bar_ms, options.clock);
        result.waiting.resize(events.size());
        std::size_t next_survivor = 0;
        for (std::size_t i = 0; i < events.size(); ++i) {
            auto& row = result.waiting[i];
            row.event = events[i];
            const auto& e = events[i];
            if (next_survivor < survivors.size() && survivors[next_survivor].asset_id == e.asset_id &&
                survivors[next_survivor].time == e.time && survivors[next_survivor].label == e.label &&
                survivors[next_survivor].source_id == e.source_id) {
                ++next_survivor;
            } else {
                row.confounded = true;
                ++result.events_confounded;
            }
            const auto& jumps = result.detection.at(e.asset_id).jumps;
            row.wait[0] = forward_distance(e.time, jumps, clock);
            row.wait[1] = backward_distance(e.time, jumps, clock);
            for (int d = 0; d < 2; ++d)
                if (!row.wait[d].censored()) row.matched_size[d] = jumps[*row.wait[d].match].statistic;
        }
        if (finish(Stage::align)) return result;

        // reference and test
        stage = Stage::reference;
        const bool run_tests = through >= Stage::test;
        std::set<std::string> labels;
        for (const auto& row : result.waiting) labels.insert(row.event.label);
        std::map<std::string, std::vector<Date>> trading_days;
        for (const auto& [asset, q] : quotes)
            for (const auto& s : q.sessions) trading_days[asset].push_back(s.date);

        std::uint64_t group_index = 0;
        for (const std::string panel : {"all", "filtered"}) {
            for (const auto& label : labels) {
                const auto gi = group_index++;
                std::vector<const WaitingTimeRow*> rows;
                for (const auto& row : result.waiting)
                    if (row.event.label == label && (panel == std::string("all") || !row.confounded))
                        rows.push_back(&row);
                if (rows.empty()) continue;

                GroupResult g;
                g.panel = panel;
                g.label = label;
                g.venue = calendar->venue();
                g.events = rows.size();
                g.welch_seed = child_seed(options.seed, {gi, 0});
                g.bootstrap_seed = child_seed(options.seed, {gi, 1});
                g.ensemble_copies = options.ensemble ? options.ensemble : default_welch_copies(rows.size());
                g.bootstrap_copies = run_tests ? options.bootstrap : 0;

                std::vector<Announcement> group_events;
                for (const auto* r : rows) group_events.push_back(r->event);
                ReferenceInputs inputs;
                for (const auto& e : group_events) ++inputs.counts[e.asset_id];
                for (const auto& [asset, _] : inputs.counts) inputs.trading_days[asset] = trading_days.at(asset);
                std::vector<std::string> fit_warnings;
                inputs.distributions = fit_intraday_distributions(group_events, options.kde, options.pooling, &fit_warnings);
                for (const auto& w : fit_warnings) result.warnings.push_back(panel + "/" + label + ": " + w);
                g.counts = inputs.counts;
                for (const auto& [asset, dist] : inputs.distributions) g.distributions[asset] = dist.describe();

                // Welch ensemble: one copy per empirical event by default.
                std::vector<ReferenceDistances> ensemble(g.ensemble_copies);
                g.example = generate_reference_sample(inputs, copy_seed(g.welch_seed, 0));
                parallel_for(g.ensemble_copies, options.workers, [&](std::size_t m) {
                    if (m == 0) {
                        ensemble[m] = reference_distances(g.example, result.detection, clock);
                        return;
                    }
                    const auto sample = generate_reference_sample(inputs, copy_seed(g.welch_seed, m));
                    ensemble[m] = reference_distances(sample, result.detection, clock);
                });

                // Bootstrap: B reference data sets of the empirical size.
                std::array<std::array<std::vector<double>, 2>, 2> boot;  // [direction][median, mean]
                stage = Stage::test;
                if (run_tests) {
                    for (auto& d : boot)
                        for (auto& v : d) v.assign(g.bootstrap_copies, std::numeric_limits<double>::quiet_NaN());
                    parallel_for(g.bootstrap_copies, options.workers, [&](std::size_t b) {
                        const auto sample = generate_reference_sample(inputs, copy_seed(g.bootstrap_seed, b));
                        auto dist = reference_distances(sample, result.detection, clock);
                        for (int d = 0; d < 2; ++d) {
                            boot[d][0][b] = median_of(dist.dir[d].hours);
                            boot[d][1][b] = mean_of(dist.dir[d].hours);
                        }
                    });
                }

                for (int d = 0; d < 2; ++d) {
                    auto& out = g.directions[d];
                    out.direction = d == 0 ? Direction::forward : Direction::backward;
                    std::vector<double> emp, emp_sizes;
                    for (const auto* r : rows) {
                        if (r->wait[d].censored()) {
                            ++out.censored;
                            continue;
                        }
                        emp.push_back(r->wait[d].hours());
                        emp_sizes.push_back(*r->matched_size[d]);
                    }
                    out.events = emp.size();
                    std::vector<double> ref, ref_sizes;
                    for (const auto& copy : ensemble) {
                        ref.insert(ref.end(), copy.dir[d].hours.begin(), copy.dir[d].hours.end());
                        ref_sizes.insert(ref_sizes.end(), copy.dir[d].sizes.begin(), copy.dir[d].sizes.end());
                        out.reference_censored += copy.dir[d].censored;
                    }
                    out.reference_events = ref.size();
                    out.median_emp = median_of(emp);
                    out.mean_emp = mean_of(emp);
                    out.median_ref = median_of(ref);
                    out.mean_ref = mean_of(ref);
                    out.size_emp = emp_sizes.size();
                    out.size_ref = ref_sizes.size();
                    out.size_mean_emp = mean_of(emp_sizes);
                    out.size_mean_ref = mean_of(ref_sizes);
                    out.size_median_emp = median_of(emp_sizes);
                    out.size_median_ref = median_of(ref_sizes);
                    if (run_tests) {
                        out.welch = maybe_welch(emp, ref);
                        out.size_welch = maybe_welch(emp_sizes, ref_sizes);
                        if (emp.empty()) {
                            out.boot_median = empty_bootstrap(Statistic::median);
                            out.boot_mean = empty_bootstrap(Statistic::mean);
                        } else {
                            out.boot_median = tail_pvalues(out.median_emp, boot[d][0], Statistic::median);
                            out.boot_mean = tail_pvalues(out.mean_emp, boot[d][1], Statistic::mean);
                            out.boot_median.sample_size = out.boot_mean.sample_size = emp.size();
                        }
                    } else {
                        out.boot_median = empty_bootstrap(Statistic::median);
                        out.boot_mean = empty_bootstrap(Statistic::mean);
                    }
                }
                result.groups.push_back(std::move(g));
                stage = Stage::reference;
            }
        }
        if (finish(Stage::reference)) return result;
        stage = Stage::test;
        finish(Stage::test);
        return result;
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

}  // namespace newsjump
