#include "newsjump/newsjump.h"

#include "newsjump/kde.hpp"
#include "newsjump/pipeline.hpp"

#include <cmath>
#include <span>
#include <string>

struct nj_config {
    newsjump::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

nj_status fail(nj_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

template <class Fn>
nj_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const newsjump::StageError& e) {
        return fail(NJ_STAGE_ERROR, e.what());
    } catch (const newsjump::ConfigError& e) {
        return fail(NJ_CONFIG_ERROR, e.what());
    } catch (const newsjump::IoError& e) {
        return fail(NJ_IO_ERROR, e.what());
    } catch (const newsjump::DataError& e) {
        return fail(NJ_DATA_ERROR, e.what());
    } catch (const newsjump::ContractError& e) {
        return fail(NJ_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(NJ_INTERNAL_ERROR, e.what());
    } catch (...) {
        return fail(NJ_INTERNAL_ERROR, "unknown error");
    }
}

}  // namespace

extern "C" {

const char* nj_last_error(void) { return g_last_error.c_str(); }

const char* nj_version(void) { return "1.0.0"; }

nj_status nj_config_create(nj_config** out) {
    if (!out) return fail(NJ_INVALID_ARGUMENT, "nj_config_create: out is NULL");
    return guarded([&] {
        *out = new nj_config{};
        return NJ_OK;
    });
}

void nj_config_destroy(nj_config* cfg) { delete cfg; }

nj_status nj_config_load(nj_config* cfg, const char* path) {
    if (!cfg || !path) return fail(NJ_INVALID_ARGUMENT, "nj_config_load: NULL argument");
    return guarded([&] {
        cfg->config = newsjump::RunConfig::load(path);
        return NJ_OK;
    });
}

nj_status nj_config_set(nj_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(NJ_INVALID_ARGUMENT, "nj_config_set: NULL argument");
    return guarded([&] {
        cfg->config.set(key, value);
        return NJ_OK;
    });
}

nj_status nj_config_validate(const nj_config* cfg) {
    if (!cfg) return fail(NJ_INVALID_ARGUMENT, "nj_config_validate: NULL config");
    return guarded([&] {
        cfg->config.validate();
        return NJ_OK;
    });
}

nj_status nj_run(const nj_config* cfg, nj_stage through, nj_stage* failed_stage) {
    if (!cfg) return fail(NJ_INVALID_ARGUMENT, "nj_run: NULL config");
    if (through < NJ_STAGE_INGEST || through > NJ_STAGE_REPORT) return fail(NJ_INVALID_ARGUMENT, "nj_run: bad stage");
    try {
        g_last_error.clear();
        newsjump::run_pipeline(cfg->config, static_cast<newsjump::Stage>(through));
        return NJ_OK;
    } catch (const newsjump::StageError& e) {
        if (failed_stage) *failed_stage = static_cast<nj_stage>(e.stage());
        return fail(NJ_STAGE_ERROR, e.what());
    } catch (const std::exception& e) {
        return fail(NJ_INTERNAL_ERROR, e.what());
    }
}

nj_status nj_synth_write(const char* dir, uint64_t seed, size_t days) {
    if (!dir) return fail(NJ_INVALID_ARGUMENT, "nj_synth_write: NULL directory");
    return guarded([&] {
        newsjump::SyntheticDataset ds;
        ds.seed = seed;
        if (days > 0) ds.days = days;
        newsjump::write_synthetic_dataset(dir, ds);
        return NJ_OK;
    });
}

nj_status nj_detection_threshold(size_t n, double alpha, double* out) {
    if (!out) return fail(NJ_INVALID_ARGUMENT, "nj_detection_threshold: NULL output");
    return guarded([&] {
        *out = newsjump::detection_threshold(n, alpha);
        return NJ_OK;
    });
}

nj_status nj_detect_jumps(const double* returns, size_t n, size_t window, double alpha, uint8_t* flags,
                          double* statistic, size_t* detected) {
    if ((!returns && n > 0) || (!flags && n > 0)) return fail(NJ_INVALID_ARGUMENT, "nj_detect_jumps: NULL array");
    return guarded([&] {
        newsjump::ReturnSeries rs;
        rs.bar_ms = newsjump::kMsPerMinute;
        rs.returns.assign(returns, returns + n);
        for (size_t k = 0; k < n; ++k) {
            rs.starts.push_back(newsjump::Timestamp{static_cast<std::int64_t>(k) * rs.bar_ms});
            rs.session.push_back(0);
        }
        const auto r = newsjump::detect_jumps(rs, {alpha, window});
        for (size_t k = 0; k < n; ++k) {
            flags[k] = 0;
            if (statistic) statistic[k] = k < r.statistic.size() ? r.statistic[k] : std::nan("");
        }
        for (const auto& j : r.jumps) flags[j.bar] = 1;
        if (detected) *detected = r.jumps.size();
        return NJ_OK;
    });
}

nj_status nj_welch_u_test(const double* x, size_t nx, const double* y, size_t ny, double* p_left, double* p_right) {
    if (!x || !y) return fail(NJ_INVALID_ARGUMENT, "nj_welch_u_test: NULL sample");
    return guarded([&] {
        const auto r = newsjump::welch_u_test(std::span<const double>(x, nx), std::span<const double>(y, ny));
        if (p_left) *p_left = r.p_left;
        if (p_right) *p_right = r.p_right;
        return NJ_OK;
    });
}

nj_status nj_kde_bandwidth(const double* samples, size_t n, double* bandwidth, int* converged) {
    if (!samples || !bandwidth) return fail(NJ_INVALID_ARGUMENT, "nj_kde_bandwidth: NULL argument");
    return guarded([&] {
        const auto r = newsjump::kde_bandwidth(std::span<const double>(samples, n));
        *bandwidth = r.bandwidth;
        if (converged) *converged = r.converged ? 1 : 0;
        return NJ_OK;
    });
}

}  // extern "C"
