#include "newsjump/csv.hpp"
#include "newsjump/pipeline.hpp"
#include "newsjump/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace newsjump {

namespace {

const char* kVersion = "1.0.0";

class OutputDir {
public:
    OutputDir(std::filesystem::path dir, RunSummary& summary) : dir_(std::move(dir)), summary_(summary) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + path.string());
        out << content;
        if (!out) throw IoError("write failed for " + path.string());
        if (std::find(summary_.files.begin(), summary_.files.end(), path) == summary_.files.end())
            summary_.files.push_back(path);
    }

private:
    std::filesystem::path dir_;
    RunSummary& summary_;
};

std::string num(double v) { return csv::num(v); }
std::string num(std::optional<double> v) { return v ? csv::num(*v) : std::string(); }

const char* direction_name(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
    return out;
}

std::string ingest_report(const IngestResult& r) {
    std::ostringstream out;
    out << "asset,input,p1_out_of_session,p2_nonpositive,p3_merged,q1_crossed,q2_wide_spread,q3_outlier,q4_halted,"
           "output,sessions\n";
    for (const auto& [asset, c] : r.cleaning) {
        const auto q = r.quotes.find(asset);
        out << csv::escape(asset) << ',' << c.input << ',' << c.p1_out_of_session << ',' << c.p2_nonpositive << ','
            << c.p3_merged << ',' << c.q1_crossed << ',' << c.q2_wide_spread << ',' << c.q3_outlier << ','
            << c.q4_halted << ',' << c.output << ',' << (q == r.quotes.end() ? 0 : q->second.sessions.size()) << '\n';
    }
    return out.str();
}

std::string reject_log(const IngestResult& r) {
    std::ostringstream out;
    out << "# rows=" << r.rows << " rejected=" << r.rejected << '\n';
    for (const auto& l : r.reject_log) out << l << '\n';
    for (const auto& l : r.log) out << "# " << l << '\n';
    return out.str();
}

std::string jumps_csv(const AnalysisResult& a) {
    std::ostringstream out;
    out << "asset_id,interval_start,interval_end,L,sign,sigma_hat\n";
    for (const auto& [asset, det] : a.detection)
        for (const auto& j : det.jumps)
            out << csv::escape(asset) << ',' << format_timestamp(j.start) << ',' << format_timestamp(j.end) << ','
                << num(j.sign * j.statistic) << ',' << j.sign << ',' << num(j.sigma_hat) << '\n';
    return out.str();
}

std::string detection_summary(const AnalysisResult& a) {
    std::ostringstream out;
    out << "asset_id,bars,testable,threshold,jumps,degenerate\n";
    for (const auto& [asset, det] : a.detection)
        out << csv::escape(asset) << ',' << det.statistic.size() << ',' << det.testable << ',' << num(det.threshold)
            << ',' << det.jumps.size() << ',' << det.degenerate << '\n';
    return out.str();
}

std::string signature_csv(const AnalysisResult& a) {
    std::ostringstream out;
    out << "seconds,mean_rv,mean_bv,days\n";
    for (const auto& p : a.signature)
        out << p.seconds << ',' << num(p.mean_rv) << ',' << num(p.mean_bv) << ',' << p.days << '\n';
    return out.str();
}

std::string seasonality_csv(const AnalysisResult& a) {
    std::ostringstream out;
    out << "offset_minutes,count,share\n";
    for (const auto& b : a.seasonality) out << b.offset_minutes << ',' << b.count << ',' << num(b.share) << '\n';
    return out.str();
}

std::string waiting_csv(const AnalysisResult& a) {
    std::ostringstream out;
    out << "asset_id,event_time,class,direction,hours,matched_L,censored,confounded\n";
    for (const auto& row : a.waiting)
        for (int d = 0; d < 2; ++d) {
            const auto& w = row.wait[d];
            out << csv::escape(row.event.asset_id) << ',' << format_timestamp(row.event.time) << ','
                << csv::escape(row.event.label) << ',' << direction_name(w.direction) << ','
                << (w.censored() ? std::string() : num(w.hours())) << ',' << num(row.matched_size[d]) << ','
                << (w.censored() ? 1 : 0) << ',' << (row.confounded ? 1 : 0) << '\n';
        }
    return out.str();
}

std::string reference_meta(const AnalysisResult& a, std::uint64_t seed) {
    std::ostringstream out;
    out << "# base_seed=" << seed << '\n';
    out << "# group g (in row order, counting every panel/class pair): welch base = splitmix64 fold of (seed, g, 0), "
           "bootstrap base = splitmix64 fold of (seed, g, 1); copy m = fold of (base, m); asset i = fold of (copy, i)\n";
    out << "panel,class,asset_id,count,distribution,welch_copies,bootstrap_copies,welch_seed,bootstrap_seed\n";
    for (const auto& g : a.groups)
        for (const auto& [asset, count] : g.counts)
            out << g.panel << ',' << csv::escape(g.label) << ',' << csv::escape(asset) << ',' << count << ','
                << csv::escape(g.distributions.at(asset)) << ',' << g.ensemble_copies << ',' << g.bootstrap_copies
                << ',' << g.welch_seed << ',' << g.bootstrap_seed << '\n';
    return out.str();
}

std::string results_distances(const AnalysisResult& a) {
    std::ostringstream out;
    out << "panel,class,venue,direction,n,censored,median_emp,median_ref,boot_median_p_left,boot_median_p_right,"
           "mean_emp,mean_ref,boot_mean_p_left,boot_mean_p_right,welch_p_left,welch_p_right,n_ref,bootstrap_B\n";
    for (const auto& g : a.groups)
        for (const auto& d : g.directions) {
            out << g.panel << ',' << csv::escape(g.label) << ',' << csv::escape(g.venue) << ','
                << direction_name(d.direction) << ',' << d.events << ',' << d.censored << ',' << num(d.median_emp)
                << ',' << num(d.median_ref) << ',' << num(d.boot_median.p_left) << ',' << num(d.boot_median.p_right)
                << ',' << num(d.mean_emp) << ',' << num(d.mean_ref) << ',' << num(d.boot_mean.p_left) << ','
                << num(d.boot_mean.p_right) << ',' << (d.welch ? num(d.welch->p_left) : "") << ','
                << (d.welch ? num(d.welch->p_right) : "") << ',' << d.reference_events << ','
                << d.boot_median.replicates << '\n';
        }
    return out.str();
}

std::string results_sizes(const AnalysisResult& a) {
    std::ostringstream out;
    out << "panel,class,venue,direction,n,mean_emp,n_ref,mean_ref,median_emp,median_ref,welch_p_left,welch_p_right\n";
    for (const auto& g : a.groups)
        for (const auto& d : g.directions)
            out << g.panel << ',' << csv::escape(g.label) << ',' << csv::escape(g.venue) << ','
                << direction_name(d.direction) << ',' << d.size_emp << ',' << num(d.size_mean_emp) << ','
                << d.size_ref << ',' << num(d.size_mean_ref) << ',' << num(d.size_median_emp) << ','
                << num(d.size_median_ref) << ',' << (d.size_welch ? num(d.size_welch->p_left) : "") << ','
                << (d.size_welch ? num(d.size_welch->p_right) : "") << '\n';
    return out.str();
}

std::string fmt(const char* f, double v) {
    if (std::isnan(v)) return "-";
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string stars(double p) {
    if (std::isnan(p)) return "";
    return p < 0.001 ? "***" : p < 0.01 ? "**" : p < 0.05 ? "*" : "";
}

std::string report_text(const IngestResult& in, const AnalysisResult& a) {
    std::ostringstream out;
    char buf[256];
    out << "newsjump report\n===============\n\n";
    out << "Ticks: " << in.rows << " rows read, " << in.rejected << " rejected; " << in.quotes.size()
        << " assets with price data.\n\n";
    out << "Jump detection\n--------------\n";
    for (const auto& [asset, det] : a.detection) {
        std::snprintf(buf, sizeof buf, "%-12s testable bars %8zu  threshold %7.4f  jumps %6zu\n", asset.c_str(),
                      det.testable, det.threshold, det.jumps.size());
        out << buf;
    }
    if (!a.seasonality.empty()) {
        std::snprintf(buf, sizeof buf, "Share of jumps in the first half-hour of the session: %.1f%%\n",
                      100.0 * a.seasonality.front().share);
        out << buf;
    }
    out << "\nAnnouncements: " << a.events_read << " read, " << a.events_without_prices << " without price data, "
        << a.events_outside_calendar << " outside the calendar, " << a.events_confounded << " confounded.\n\n";

    for (int d = 0; d < 2; ++d) {
        out << (d == 0 ? "Forward" : "Backward") << " waiting times (hours)\n";
        out << "panel     class                 n   cens   median d  median d~  p_left   p_right     mean d    "
               "mean d~  welch_l   welch_r\n";
        for (const auto& g : a.groups) {
            const auto& r = g.directions[d];
            const double wl = r.welch ? r.welch->p_left : std::nan("");
            const double wr = r.welch ? r.welch->p_right : std::nan("");
            std::snprintf(buf, sizeof buf, "%-9s %-18s %5zu %6zu %10s %10s %6s%-3s %6s%-3s %10s %10s %7s%-3s %7s%-3s\n",
                          g.panel.c_str(), g.label.substr(0, 18).c_str(), r.events, r.censored,
                          fmt("%.3f", r.median_emp).c_str(), fmt("%.3f", r.median_ref).c_str(),
                          fmt("%.3f", r.boot_median.p_left).c_str(), stars(r.boot_median.p_left).c_str(),
                          fmt("%.3f", r.boot_median.p_right).c_str(), stars(r.boot_median.p_right).c_str(),
                          fmt("%.3f", r.mean_emp).c_str(), fmt("%.3f", r.mean_ref).c_str(), fmt("%.3g", wl).c_str(),
                          stars(wl).c_str(), fmt("%.3g", wr).c_str(), stars(wr).c_str());
            out << buf;
        }
        out << '\n';
    }
    out << "Nearest jump sizes |L|\n";
    out << "panel     class              dir           n   mean |L|      n_ref  mean |L~|   welch_l   welch_r\n";
    for (const auto& g : a.groups)
        for (const auto& r : g.directions) {
            const double wl = r.size_welch ? r.size_welch->p_left : std::nan("");
            const double wr = r.size_welch ? r.size_welch->p_right : std::nan("");
            std::snprintf(buf, sizeof buf, "%-9s %-18s %-8s %6zu %10s %10zu %10s %7s%-3s %7s%-3s\n", g.panel.c_str(),
                          g.label.substr(0, 18).c_str(), direction_name(r.direction), r.size_emp,
                          fmt("%.2f", r.size_mean_emp).c_str(), r.size_ref, fmt("%.2f", r.size_mean_ref).c_str(),
                          fmt("%.3g", wl).c_str(), stars(wl).c_str(), fmt("%.3g", wr).c_str(), stars(wr).c_str());
            out << buf;
        }
    out << "\nSignificance: * p < 0.05, ** p < 0.01, *** p < 0.001. Censored waiting times are excluded.\n";
    if (!a.warnings.empty()) {
        out << "\nWarnings\n--------\n";
        for (const auto& w : a.warnings) out << "- " << w << '\n';
    }
    return out.str();
}

std::string manifest(const RunConfig& config, Stage through, const std::optional<StageError>& failure,
                     const IngestResult* in, const AnalysisResult* a, const RunSummary& summary) {
    std::ostringstream out;
    out << "tool = newsjump " << kVersion << '\n';
    out << "requested_stage = " << to_string(through) << '\n';
    out << "status = " << (failure ? std::string("failed at ") + to_string(failure->stage()) : "ok") << '\n';
    if (failure) out << "error = " << failure->what() << '\n';
    out << "\n[config]\n";
    for (const auto& [k, v] : config.entries()) out << k << " = " << v << '\n';
    out << "\n[seeds]\n";
    out << "base_seed = " << config.seed << '\n';
    out << "derivation = splitmix64 fold; group g: welch (seed, g, 0), bootstrap (seed, g, 1); copy m: (base, m); "
           "asset i in id order: (copy, i)\n";
    if (a)
        for (const auto& g : a->groups)
            out << "group " << g.panel << '/' << g.label << " = welch " << g.welch_seed << " x" << g.ensemble_copies
                << ", bootstrap " << g.bootstrap_seed << " x" << g.bootstrap_copies << '\n';
    out << "\n[counts]\n";
    if (in) {
        out << "tick_rows = " << in->rows << '\n';
        out << "tick_rejected = " << in->rejected << '\n';
        for (const auto& [asset, c] : in->cleaning)
            out << "cleaning " << asset << " = input " << c.input << ", P1 " << c.p1_out_of_session << ", P2 "
                << c.p2_nonpositive << ", P3 " << c.p3_merged << ", Q1 " << c.q1_crossed << ", Q2 " << c.q2_wide_spread
                << ", Q3 " << c.q3_outlier << ", Q4 " << c.q4_halted << ", output " << c.output << '\n';
    }
    if (a) {
        for (const auto& [asset, det] : a->detection)
            out << "jumps " << asset << " = " << det.jumps.size() << " of " << det.testable << " testable bars\n";
        out << "announcements_read = " << a->events_read << '\n';
        out << "announcements_without_prices = " << a->events_without_prices << '\n';
        out << "announcements_outside_calendar = " << a->events_outside_calendar << '\n';
        out << "announcements_confounded = " << a->events_confounded << '\n';
        for (const auto& g : a->groups)
            for (const auto& d : g.directions)
                out << "censored " << g.panel << '/' << g.label << '/' << direction_name(d.direction) << " = "
                    << d.censored << " of " << g.events << '\n';
    }
    out << "\n[decisions]\n";
    out << "ties = mid-ranks; welch df = Welch-Satterthwaite on rank variances\n";
    out << "bootstrap ties = counted in both tails\n";
    out << "censored waiting times = excluded from test samples\n";
    out << "confounding window = calendar hours, inclusive\n";
    out << "non-trading gaps = each capped at one bar length\n";
    out << "reference intraday support = whole calendar day\n";
    out << "jump test = bars with a full bipower window only; n per asset\n";
    out << "\n[warnings]\n";
    if (a)
        for (const auto& w : a->warnings) out << "- " << w << '\n';
    for (const auto& w : summary.warnings) out << "- " << w << '\n';
    out << "\n[files]\n";
    for (const auto& f : summary.files) out << f.filename().string() << '\n';
    return out.str();
}

}  // namespace

RunSummary run_pipeline(const RunConfig& config, Stage through) {
    RunSummary summary;
    try {
        config.validate();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(Stage::config, e.what());
    }
    OutputDir dir(config.out, summary);
    std::optional<StageError> failure;
    IngestResult in;
    AnalysisResult analysis;
    bool ingested = false, analysed = false;
    try {
        try {
            in = ingest_data(config);
            ingested = true;
            dir.write("ingest_report.csv", ingest_report(in));
            dir.write("reject_log.txt", reject_log(in));
        } catch (const std::exception& e) {
            throw StageError(Stage::ingest, e.what());
        }
        if (through > Stage::ingest) {
            std::vector<Announcement> events;
            for (const auto& f : config.announcement_files) {
                try {
                    auto part = read_announcements_file(f, in.calendar->utc_offset_ms());
                    events.insert(events.end(), part.begin(), part.end());
                } catch (const std::exception& e) {
                    throw StageError(Stage::align, e.what());
                }
            }
            auto options = AnalysisOptions::from(config);
            const Stage analysis_end = std::min(through, Stage::test);
            analysis = analyse(in.calendar, in.quotes, events, options, analysis_end,
                               [&](Stage s, const AnalysisResult& a) {
                                   if (s == Stage::detect) {
                                       dir.write("jumps.csv", jumps_csv(a));
                                       dir.write("detection_summary.csv", detection_summary(a));
                                       dir.write("signature.csv", signature_csv(a));
                                       dir.write("jump_seasonality.csv", seasonality_csv(a));
                                   } else if (s == Stage::align) {
                                       dir.write("waiting_times.csv", waiting_csv(a));
                                   } else if (s == Stage::reference) {
                                       dir.write("reference_meta.csv", reference_meta(a, config.seed));
                                       for (const auto& g : a.groups) {
                                           std::ostringstream sample;
                                           write_reference_sample(sample, g.example, g.label);
                                           dir.write("reference_sample_" + g.panel + "_" + sanitize(g.label) + ".csv",
                                                     sample.str());
                                       }
                                   } else if (s == Stage::test) {
                                       dir.write("results_distances.csv", results_distances(a));
                                       dir.write("results_jump_sizes.csv", results_sizes(a));
                                   }
                               });
            analysed = true;
            summary.warnings = analysis.warnings;
        }
        if (through >= Stage::report) {
            try {
                dir.write("report.txt", report_text(in, analysis));
            } catch (const std::exception& e) {
                throw StageError(Stage::report, e.what());
            }
        }
    } catch (const StageError& e) {
        failure = e;
    }
    dir.write("manifest.txt",
              manifest(config, through, failure, ingested ? &in : nullptr, analysed ? &analysis : nullptr, summary));
    if (failure) throw *failure;
    return summary;
}

SyntheticDataset::SyntheticDataset() {
    params.sigma = 0.15;
    params.jump_intensity = 0.12;
    params.response.events_per_day = 0.6;
    params.response.in_session_share = 0.7;
    params.response.probability = 0.5;
    params.response.lag_min = 0;
    params.response.lag_max = 2;
    params.response.label = "scheduled";
    layout.grid_seconds = 60;
}

RunSummary write_synthetic_dataset(const std::filesystem::path& out_dir, const SyntheticDataset& ds) {
    RunSummary summary;
    OutputDir dir(out_dir, summary);
    const auto path = simulate_path(ds.params, ds.days, ds.bars_per_day, ds.seed, ds.layout);

    // Unrelated announcements at uniform calendar times, for a null class.
    std::vector<Announcement> events = path.announcements;
    Rng rng(child_seed(ds.seed, {99}));
    const auto& sessions = path.calendar->sessions();
    const std::size_t extra = std::max<std::size_t>(1, ds.days * 3 / 10);
    for (std::size_t k = 0; k < extra; ++k) {
        const auto& s = sessions[uniform_index(rng, sessions.size())];
        const auto clock = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(kMsPerDay)));
        events.push_back({ds.layout.asset_id, Timestamp::at(s.date, clock), "non-scheduled", "synth"});
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Announcement& a, const Announcement& b) { return a.time < b.time; });

    std::ostringstream ticks, ann, jumps;
    write_ticks(ticks, path);
    const std::vector<std::string> meta{"seed=" + std::to_string(ds.seed)};
    write_announcements(ann, events, meta);
    write_true_jumps(jumps, path);
    dir.write("ticks.csv", ticks.str());
    dir.write("announcements.csv", events.empty() ? std::string("asset_id,timestamp,class,source_id\n") : ann.str());
    dir.write("calendar.txt", path.calendar->to_kv());
    dir.write("true_jumps.csv", jumps.str());

    std::ostringstream cfg;
    cfg << "# synthetic dataset, seed " << ds.seed << "\n"
        << "[data]\nticks = ticks.csv\nannouncements = announcements.csv\ncalendar = calendar.txt\n\n"
        << "[detect]\nbar_minutes = " << csv::num(static_cast<double>(ds.layout.bar_seconds) / 60.0)
        << "\ngrid_seconds = " << ds.layout.grid_seconds << "\nalpha = 0.01\nwindow = 156\n\n"
        << "[align]\nconfounding_hours = 6\nclock = trading\n\n"
        << "[reference]\nkde = auto\npooling = per_asset\nensemble = 0\nbootstrap = 10000\nseed = " << ds.seed
        << "\n\n[run]\nout = out\n";
    dir.write("config.ini", cfg.str());
    return summary;
}

}  // namespace newsjump
