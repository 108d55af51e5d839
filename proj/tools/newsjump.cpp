// newsjump command-line front end; talks to the library only through the C API.
#include "newsjump/newsjump.h"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kUsageExit = 1;

int stage_exit(nj_stage stage) { return static_cast<int>(stage) + 2; }

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha;
    std::optional<double> bar_minutes;
    std::optional<std::string> kde;
    std::optional<std::size_t> ensemble;
    std::optional<std::size_t> bootstrap;
    std::optional<std::string> out;
    std::optional<std::size_t> workers;
};

void add_run_flags(CLI::App& cmd, Overrides& o) {
    cmd.add_option("--config", o.config, "Run configuration file")->required();
    cmd.add_option("--seed", o.seed, "Base seed for reference simulation");
    cmd.add_option("--alpha", o.alpha, "Detection significance level");
    cmd.add_option("--bar-minutes", o.bar_minutes, "Bar length in minutes");
    cmd.add_option("--kde", o.kde, "Intraday distribution: auto, atoms or kde")
        ->check(CLI::IsMember({"auto", "atoms", "kde"}));
    cmd.add_option("--ensemble", o.ensemble, "Welch ensemble copies (0 = number of events)");
    cmd.add_option("--bootstrap", o.bootstrap, "Bootstrap reference data sets");
    cmd.add_option("--out", o.out, "Output directory");
    cmd.add_option("--workers", o.workers, "Worker threads (0 = all cores)");
}

std::string number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int report_failure(const char* what, nj_stage stage) {
    std::fprintf(stderr, "newsjump: %s: %s\n", what, nj_last_error());
    return stage_exit(stage);
}

int run(const Overrides& o, nj_stage through) {
    nj_config* cfg = nullptr;
    if (nj_config_create(&cfg) != NJ_OK) return report_failure("config", NJ_STAGE_CONFIG);
    struct Guard {
        nj_config* c;
        ~Guard() { nj_config_destroy(c); }
    } guard{cfg};

    if (nj_config_load(cfg, o.config.c_str()) != NJ_OK) return report_failure("config", NJ_STAGE_CONFIG);
    std::vector<std::pair<std::string, std::string>> sets;
    if (o.seed) sets.emplace_back("reference.seed", std::to_string(*o.seed));
    if (o.alpha) sets.emplace_back("detect.alpha", number(*o.alpha));
    if (o.bar_minutes) sets.emplace_back("detect.bar_minutes", number(*o.bar_minutes));
    if (o.kde) sets.emplace_back("reference.kde", *o.kde);
    if (o.ensemble) sets.emplace_back("reference.ensemble", std::to_string(*o.ensemble));
    if (o.bootstrap) sets.emplace_back("reference.bootstrap", std::to_string(*o.bootstrap));
    if (o.out) sets.emplace_back("run.out", *o.out);
    if (o.workers) sets.emplace_back("run.workers", std::to_string(*o.workers));
    for (const auto& [k, v] : sets)
        if (nj_config_set(cfg, k.c_str(), v.c_str()) != NJ_OK) return report_failure("config", NJ_STAGE_CONFIG);

    nj_stage failed = NJ_STAGE_CONFIG;
    const nj_status status = nj_run(cfg, through, &failed);
    if (status == NJ_OK) return 0;
    if (status != NJ_STAGE_ERROR) failed = NJ_STAGE_CONFIG;
    std::fprintf(stderr, "newsjump: %s\n", nj_last_error());
    return stage_exit(failed);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Intraday jump detection and news waiting-time tests"};
    app.set_version_flag("--version", std::string(nj_version()));
    app.require_subcommand(1);

    struct Command {
        const char* name;
        const char* help;
        nj_stage through;
    };
    const Command commands[] = {
        {"ingest", "Parse, clean and resample ticks", NJ_STAGE_INGEST},
        {"detect", "Detect jumps (runs ingest first)", NJ_STAGE_DETECT},
        {"align", "Compute waiting times (runs all earlier stages)", NJ_STAGE_ALIGN},
        {"reference", "Generate reference samples (runs all earlier stages)", NJ_STAGE_REFERENCE},
        {"test", "Run Welch and bootstrap tests (runs all earlier stages)", NJ_STAGE_TEST},
        {"report", "Full run ending with report.txt", NJ_STAGE_REPORT},
        {"all", "Full run: every output, report and manifest", NJ_STAGE_REPORT},
    };
    std::vector<Overrides> overrides(std::size(commands));
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < std::size(commands); ++i) {
        auto* sub = app.add_subcommand(commands[i].name, commands[i].help);
        add_run_flags(*sub, overrides[i]);
        subs.push_back(sub);
    }

    std::string synth_out = "synthetic";
    std::uint64_t synth_seed = 1;
    std::size_t synth_days = 0;
    auto* synth = app.add_subcommand("synth", "Write the bundled synthetic dataset");
    synth->add_option("--out", synth_out, "Output directory");
    synth->add_option("--seed", synth_seed, "Simulation seed");
    synth->add_option("--days", synth_days, "Trading days (0 = default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageExit;
    }

    if (synth->parsed()) {
        if (nj_synth_write(synth_out.c_str(), synth_seed, synth_days) != NJ_OK)
            return report_failure("synth", NJ_STAGE_SYNTH);
        std::printf("synthetic dataset written to %s\n", synth_out.c_str());
        return 0;
    }
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed()) return run(overrides[i], commands[i].through);
    return kUsageExit;
}
