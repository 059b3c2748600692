/* peakon: C interface to the peakon-perturbation lab.
 *
 * Objects are opaque and owned by the caller once returned; release them with
 * the matching *_free function (NULL is accepted). Every fallible call returns
 * a peakon_status; on failure peakon_last_error() holds a message for the
 * calling thread until its next failing call.
 */
#ifndef PEAKON_PEAKON_H
#define PEAKON_PEAKON_H

#include <stddef.h>

#if defined(_WIN32)
#define PEAKON_API __declspec(dllexport)
#else
#define PEAKON_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum peakon_status {
  PEAKON_OK = 0,
  PEAKON_ERR_NULL_ARGUMENT = 1,
  PEAKON_ERR_INVALID_ARGUMENT = 2,
  PEAKON_ERR_PARSE = 3,
  PEAKON_ERR_VALIDATION = 4,
  PEAKON_ERR_IO = 5,
  PEAKON_ERR_INVALID_GRID = 6,
  PEAKON_ERR_BOUNDARY_DECAY = 7,
  PEAKON_ERR_CONTINUITY = 8,
  PEAKON_ERR_JACOBIAN = 9,
  PEAKON_ERR_STEP_SIZE = 10,
  PEAKON_ERR_BUFFER_TOO_SMALL = 11,
  PEAKON_ERR_OUT_OF_RANGE = 12,
  PEAKON_ERR_INTERNAL = 13
} peakon_status;

typedef enum peakon_audit_status {
  PEAKON_AUDIT_PASS = 0,
  PEAKON_AUDIT_FAIL = 1,
  PEAKON_AUDIT_SKIPPED = 2
} peakon_audit_status;

typedef struct peakon_config peakon_config;
typedef struct peakon_run peakon_run;

PEAKON_API const char* peakon_version(void);
PEAKON_API const char* peakon_status_string(peakon_status status);
/* Message of the last failure on this thread, "" if none. */
PEAKON_API const char* peakon_last_error(void);

/* Default configuration (scenario identities). */
PEAKON_API peakon_status peakon_config_new(peakon_config** out);
/* Parses `key = value` text; '#' starts a comment. */
PEAKON_API peakon_status peakon_config_parse(const char* text, peakon_config** out);
PEAKON_API peakon_status peakon_config_load(const char* path, peakon_config** out);
/* Sets one key from its text form and revalidates; on failure cfg is unchanged. */
PEAKON_API peakon_status peakon_config_set(peakon_config* cfg, const char* key, const char* value);
/* Writes the fully resolved config. *len receives the length without the
 * terminator; with buf == NULL or cap too small only *len is set and
 * PEAKON_ERR_BUFFER_TOO_SMALL is returned (PEAKON_OK when buf is NULL). */
PEAKON_API peakon_status peakon_config_serialize(const peakon_config* cfg, char* buf, size_t cap, size_t* len);
PEAKON_API void peakon_config_free(peakon_config* cfg);

/* Runs the configured scenario and writes its artifacts. A run whose audits
 * fail still returns PEAKON_OK; inspect it with peakon_run_passed. */
PEAKON_API peakon_status peakon_run_experiment(const peakon_config* cfg, peakon_run** out);
PEAKON_API int peakon_run_passed(const peakon_run* run);
PEAKON_API size_t peakon_run_audit_count(const peakon_run* run);
/* Strings stay valid until the run is freed. Any of the out pointers may be NULL. */
PEAKON_API peakon_status peakon_run_audit(const peakon_run* run, size_t index, const char** name,
                                          peakon_audit_status* status, const char** detail);
/* "name: detail" of the first failed audit, "" if all passed. */
PEAKON_API const char* peakon_run_first_failure(const peakon_run* run);
/* Report values: rate, r2, t0_estimate, T_num, T_riccati, pq_max, E_drift,
 * F_drift. PEAKON_ERR_OUT_OF_RANGE if the key is unknown or not set by the scenario. */
PEAKON_API peakon_status peakon_run_report_value(const peakon_run* run, const char* key, double* out);
PEAKON_API void peakon_run_free(peakon_run* run);

#ifdef __cplusplus
}
#endif

#endif /* PEAKON_PEAKON_H */
