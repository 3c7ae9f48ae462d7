/* C interface to the threshq library: threshold quality of location estimators.
 *
 * Every fallible call returns a tq_status. On failure the message is available
 * from tq_last_error() (per thread) until the next call on that thread.
 * Strings handed out by the library are released with tq_string_free.
 */
#ifndef THRESHQ_H
#define THRESHQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(THRESHQ_BUILDING_LIBRARY)
#define TQ_API __declspec(dllexport)
#else
#define TQ_API __declspec(dllimport)
#endif
#else
#define TQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tq_status {
  TQ_OK = 0,
  TQ_ERR_INVALID_ARGUMENT = 1,
  TQ_ERR_CONFIG = 2,
  TQ_ERR_LIMIT = 3,
  TQ_ERR_DOMAIN = 4,
  TQ_ERR_INCONSISTENT = 5,
  TQ_ERR_IO = 6,
  TQ_ERR_INTERNAL = 7
} tq_status;

typedef struct tq_distribution tq_distribution;
typedef struct tq_estimator tq_estimator;
typedef struct tq_config tq_config;
typedef struct tq_result tq_result;

typedef struct tq_mc_config {
  uint64_t trials;
  uint64_t seed;
  unsigned parallelism;
  double ci_level;
} tq_mc_config;

TQ_API const char* tq_version(void);
TQ_API const char* tq_last_error(void);
TQ_API const char* tq_status_name(tq_status status);
TQ_API void tq_string_free(char* s);

/* 100000 trials, seed 42, one thread, 95% intervals. */
TQ_API void tq_mc_config_default(tq_mc_config* mc);

/* Distributions from a JSON record such as {"family": "exponential", "rate": 1}. */
TQ_API tq_status tq_distribution_from_json(const char* spec, tq_distribution** out);
TQ_API void tq_distribution_free(tq_distribution* d);
TQ_API tq_status tq_distribution_describe(const tq_distribution* d, char** out);
TQ_API tq_status tq_distribution_pdf(const tq_distribution* d, double x, double* out);
TQ_API tq_status tq_distribution_cdf(const tq_distribution* d, double x, double* out);
/* n draws from the law shifted by theta, deterministic in seed. */
TQ_API tq_status tq_distribution_sample(const tq_distribution* d, double theta, uint64_t seed, size_t n, double* out);

/* Estimators from a JSON record such as {"kind": "min_shift"}; built for law d,
 * threshold delta and sample count n. delta_text is a number or "p/q". */
TQ_API tq_status tq_estimator_from_json(const char* spec, const tq_distribution* d, const char* delta_text, size_t n,
                                        int closed_interval, tq_estimator** out);
TQ_API void tq_estimator_free(tq_estimator* e);
TQ_API tq_status tq_estimator_label(const tq_estimator* e, char** out);
TQ_API int tq_estimator_is_shift_invariant(const tq_estimator* e);
/* seed drives the component choice of mixtures and is ignored otherwise. */
TQ_API tq_status tq_estimator_evaluate(const tq_estimator* e, const double* x, size_t n, uint64_t seed, double* out);

/* Monte Carlo P(|e(x) - theta| < delta) for x drawn from the law shifted by theta. */
TQ_API tq_status tq_quality_at(const tq_estimator* e, const tq_distribution* d, size_t n, double theta, double delta,
                               const tq_mc_config* mc, int closed_interval, double* q, double* ci_half_width);

/* Exact tree quality over a ball as a "p/q" string; estimator_spec may be NULL (truncation). */
TQ_API tq_status tq_tree_quality(const char* estimator_spec, double delta, size_t radius, char** out);

/* Experiment configs. tq_config_parse only checks JSON syntax; overrides may be
 * applied before tq_config_validate, which lists every field error. */
TQ_API tq_status tq_config_new(const char* command, tq_config** out);
TQ_API tq_status tq_config_parse(const char* text, tq_config** out);
TQ_API void tq_config_free(tq_config* c);
/* Sets the value at a JSON pointer (e.g. "/mc/seed") from JSON text (e.g. "7"). */
TQ_API tq_status tq_config_set_json(tq_config* c, const char* pointer, const char* json_value);
TQ_API tq_status tq_config_set_string(tq_config* c, const char* pointer, const char* value);
TQ_API tq_status tq_config_set_command(tq_config* c, const char* command);
TQ_API tq_status tq_config_set_delta(tq_config* c, const char* text);
TQ_API tq_status tq_config_validate(tq_config* c);
/* Normalized config with every default filled in; requires a valid config. */
TQ_API tq_status tq_config_to_json(tq_config* c, char** out);

TQ_API tq_status tq_run(tq_config* c, tq_result** out);
TQ_API void tq_result_free(tq_result* r);
TQ_API int tq_result_exit_code(const tq_result* r);
TQ_API const char* tq_result_summary(const tq_result* r);
TQ_API const char* tq_result_payload(const tq_result* r);
/* Path the payload was written to, or "" when it was not written. */
TQ_API const char* tq_result_written_path(const tq_result* r);

/* CLI exit status for a failing status code. */
TQ_API int tq_exit_status(tq_status status);

#ifdef __cplusplus
}
#endif

#endif
