/* C interface to the newsjump library. */
#ifndef NEWSJUMP_H
#define NEWSJUMP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NJ_API __declspec(dllexport)
#else
#define NJ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nj_status {
    NJ_OK = 0,
    NJ_INVALID_ARGUMENT = 1,
    NJ_CONFIG_ERROR = 2,
    NJ_IO_ERROR = 3,
    NJ_DATA_ERROR = 4,
    NJ_STAGE_ERROR = 5,
    NJ_INTERNAL_ERROR = 6
} nj_status;

typedef enum nj_stage {
    NJ_STAGE_CONFIG = 0,
    NJ_STAGE_INGEST = 1,
    NJ_STAGE_DETECT = 2,
    NJ_STAGE_ALIGN = 3,
    NJ_STAGE_REFERENCE = 4,
    NJ_STAGE_TEST = 5,
    NJ_STAGE_REPORT = 6,
    NJ_STAGE_SYNTH = 7
} nj_stage;

typedef struct nj_config nj_config;

/* Message of the last failed call on this thread; never NULL. */
NJ_API const char* nj_last_error(void);
NJ_API const char* nj_version(void);

NJ_API nj_status nj_config_create(nj_config** out);
NJ_API void nj_config_destroy(nj_config* cfg);
/* Replaces the configuration with the contents of a config file. */
NJ_API nj_status nj_config_load(nj_config* cfg, const char* path);
/* Sets one key, "section.key" or a bare key such as "alpha". */
NJ_API nj_status nj_config_set(nj_config* cfg, const char* key, const char* value);
NJ_API nj_status nj_config_validate(const nj_config* cfg);

/* Runs ingest and every stage up to `through`, writing outputs to the
 * configured directory. On NJ_STAGE_ERROR the failing stage is stored in
 * `failed_stage` when it is not NULL. */
NJ_API nj_status nj_run(const nj_config* cfg, nj_stage through, nj_stage* failed_stage);

/* Writes the bundled synthetic dataset (ticks, announcements, calendar,
 * true jumps, config.ini) to `dir`. `days` 0 keeps the default. */
NJ_API nj_status nj_synth_write(const char* dir, uint64_t seed, size_t days);

/* Rejection threshold for |L| over n tested bars. */
NJ_API nj_status nj_detection_threshold(size_t n, double alpha, double* out);

/* Jump detection on one return series. `flags` (length n) receives 1 for
 * detected bars, `statistic` (length n, optional) receives L or NaN. */
NJ_API nj_status nj_detect_jumps(const double* returns, size_t n, size_t window, double alpha, uint8_t* flags,
                                 double* statistic, size_t* detected);

/* Welch test on mid-ranks; left tail tests mean rank(x) < mean rank(y). */
NJ_API nj_status nj_welch_u_test(const double* x, size_t nx, const double* y, size_t ny, double* p_left,
                                 double* p_right);

/* Diffusion bandwidth for samples in [0, 1]; `converged` is 0 when the
 * Silverman fallback was used. */
NJ_API nj_status nj_kde_bandwidth(const double* samples, size_t n, double* bandwidth, int* converged);

#ifdef __cplusplus
}
#endif

#endif /* NEWSJUMP_H */
