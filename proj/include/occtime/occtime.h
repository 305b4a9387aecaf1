/* C interface to the occtime library.
 *
 * All functions return an occt_status. On failure, occt_last_error() gives a
 * message for the calling thread until its next call into the library.
 * Handles are opaque; every *_create has a matching *_destroy, which accepts
 * NULL.
 */
#ifndef OCCTIME_OCCTIME_H
#define OCCTIME_OCCTIME_H

#include <stddef.h>
#include <stdint.h>

#if defined(OCCTIME_BUILDING_LIBRARY)
#define OCCT_API __attribute__((visibility("default")))
#else
#define OCCT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum occt_status {
  OCCT_OK = 0,
  OCCT_DOMAIN_ERROR = 1,   /* a precondition on the arguments failed */
  OCCT_NUMERIC_ERROR = 2,  /* a quadrature or series did not converge */
  OCCT_INVALID_ARGUMENT = 3,
  OCCT_INTERNAL_ERROR = 4
} occt_status;

typedef struct occt_law occt_law;
typedef struct occt_config occt_config;
typedef struct occt_report occt_report;

OCCT_API const char* occt_version(void);
OCCT_API const char* occt_last_error(void);

/* Symmetric alpha-stable law with characteristic function exp(-|u|^alpha t). */
OCCT_API occt_status occt_law_create(double alpha, occt_law** out);
OCCT_API void occt_law_destroy(occt_law* law);
OCCT_API occt_status occt_law_density(const occt_law* law, double x, double t, double* out);
OCCT_API occt_status occt_law_tail_prob(const occt_law* law, double x, double t, double* out);
OCCT_API occt_status occt_law_abs_moment(const occt_law* law, double p, double* out);
/* Draws count values of X_1 from the stream (seed, stream_id). */
OCCT_API occt_status occt_law_sample(const occt_law* law, uint64_t seed, uint64_t stream_id, double* out,
                                     size_t count);

/* Exact mean squared error of the Riemann estimator of the time spent in
 * [0, inf) up to T from n steps. */
OCCT_API occt_status occt_exact_riemann_error(double alpha, double T, int64_t n, double* out);
/* Limit of the normalized error of that estimator. */
OCCT_API occt_status occt_riemann_limit(double alpha, double T, double* out);
OCCT_API occt_status occt_tilde_C(double alpha, double* out);

/* Options for occt_run, keyed by long flag name ("alpha", "n", "reps",
 * ...). Values are strings as on the command line. */
OCCT_API occt_status occt_config_create(occt_config** out);
OCCT_API void occt_config_destroy(occt_config* config);
OCCT_API occt_status occt_config_set(occt_config* config, const char* key, const char* value);

/* Runs "density", "sample", "constants" or "study/<name>". */
OCCT_API occt_status occt_run(const char* command, const occt_config* config, occt_report** out);
OCCT_API void occt_report_destroy(occt_report* report);
/* Strings owned by the report. */
OCCT_API const char* occt_report_table(const occt_report* report);
OCCT_API const char* occt_report_manifest(const occt_report* report);
OCCT_API const char* occt_report_summary(const occt_report* report);
/* 1 if every check performed by the command passed, else 0. */
OCCT_API int occt_report_passed(const occt_report* report);

#ifdef __cplusplus
}
#endif

#endif
