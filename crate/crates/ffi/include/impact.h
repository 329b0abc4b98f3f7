#ifndef IMPACT_H
#define IMPACT_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ImpactLevel {
  IMPACT_LEVEL_STOCK = 0,
  IMPACT_LEVEL_TRADER = 1,
} ImpactLevel;

typedef enum ImpactStatus {
  IMPACT_STATUS_OK = 0,
  IMPACT_STATUS_NULL_POINTER = 1,
  IMPACT_STATUS_INVALID_ARGUMENT = 2,
  IMPACT_STATUS_CONFIG = 3,
  IMPACT_STATUS_DATA = 4,
  IMPACT_STATUS_NUMERIC = 5,
  IMPACT_STATUS_IO = 6,
  IMPACT_STATUS_PANIC = 7,
} ImpactStatus;

typedef enum ImpactVariant {
  IMPACT_VARIANT_CONTINUOUS = 0,
  IMPACT_VARIANT_DISCRETE = 1,
} ImpactVariant;

/**
 * Pipeline configuration.
 */
typedef struct ImpactConfig ImpactConfig;

/**
 * Result of a pipeline run.
 */
typedef struct ImpactReport ImpactReport;

typedef struct ImpactTailFit {
  double exponent;
  double x_min;
  size_t n_tail;
  double ks;
} ImpactTailFit;

typedef struct ImpactPowerFit {
  double delta;
  double c;
  size_t n_bin;
  double objective;
  bool converged;
} ImpactPowerFit;

typedef struct ImpactLevelSummary {
  /**
   * Number of fitted entities.
   */
  size_t n;
  double mean_delta;
  double std_delta;
  double sem_delta;
  /**
   * False when the run had no Monte Carlo stage for this level; the
   * three fields below are then NaN.
   */
  bool has_corrected;
  double corrected_delta;
  double corrected_se;
  double bias;
} ImpactLevelSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *impact_version(void);

/**
 * Copy the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL, or 0
 * when there is no error.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t impact_last_error(char *buf, size_t len);

/**
 * Tail exponent with x_min chosen by KS minimisation.
 *
 * # Safety
 * `samples` must be valid for `n` doubles; `out` must be writable.
 */
enum ImpactStatus impact_tail_fit(const double *samples,
                                  size_t n,
                                  enum ImpactVariant variant,
                                  struct ImpactTailFit *out);

/**
 * Bin `(q[i], impact[i])` on the default log grid and fit `c * q^delta`
 * over bins holding more than `min_bin_count` samples.
 *
 * # Safety
 * `q` and `impact` must be valid for `n` doubles; `out` must be writable.
 */
enum ImpactStatus impact_fit_samples(const double *q,
                                     const double *impact,
                                     size_t n,
                                     size_t min_bin_count,
                                     struct ImpactPowerFit *out);

/**
 * Load a TOML config. Relative input paths resolve against its directory.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string; `out` must be writable.
 */
enum ImpactStatus impact_config_load(const char *config_path, struct ImpactConfig **out);

/**
 * Override both the Monte Carlo and the synthetic-generator seed.
 *
 * # Safety
 * `cfg` must come from [`impact_config_load`].
 */
enum ImpactStatus impact_config_set_seed(struct ImpactConfig *cfg, uint64_t seed);

/**
 * # Safety
 * `cfg` must be null or come from [`impact_config_load`], and not be used afterwards.
 */
void impact_config_free(struct ImpactConfig *cfg);

/**
 * Run every stage, writing artifacts under `out_dir`.
 *
 * # Safety
 * `cfg` must come from [`impact_config_load`]; `out_dir` must be a
 * NUL-terminated string; `out` must be writable.
 */
enum ImpactStatus impact_pipeline_run(const struct ImpactConfig *cfg,
                                      const char *out_dir,
                                      struct ImpactReport **out);

/**
 * Summary of the fitted exponents at one level.
 *
 * # Safety
 * `report` must come from [`impact_pipeline_run`]; `out` must be writable.
 */
enum ImpactStatus impact_report_summary(const struct ImpactReport *report,
                                        enum ImpactLevel level,
                                        struct ImpactLevelSummary *out);

/**
 * # Safety
 * `report` must be null or come from [`impact_pipeline_run`], and not be used afterwards.
 */
void impact_report_free(struct ImpactReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IMPACT_H */
