#ifndef BBMLAB_BBMLAB_H
#define BBMLAB_BBMLAB_H

/* C interface to the bbm-lab core. All strings are UTF-8 and NUL-terminated.
 * Strings returned through char** are owned by the caller and released with
 * bbm_string_free. Functions are safe to call from several threads on
 * distinct handles; bbm_last_error is per thread. */

#include <stdint.h>

#if defined(BBMLAB_BUILDING_LIBRARY)
#define BBMLAB_API __attribute__((visibility("default")))
#else
#define BBMLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bbm_status {
  BBM_OK = 0,
  BBM_CHECK_FAILED = 1,
  BBM_USAGE = 2,
  BBM_RESOURCE = 3,
  BBM_IO = 4,
  BBM_INTERNAL = 5
} bbm_status;

typedef struct bbm_config bbm_config;
typedef struct bbm_report bbm_report;

BBMLAB_API const char* bbm_version(void);

/* Message of the last failed call on this thread, or "" when none. */
BBMLAB_API const char* bbm_last_error(void);

BBMLAB_API bbm_status bbm_config_new(bbm_config** out);
BBMLAB_API bbm_status bbm_config_load(const char* path, bbm_config** out);
BBMLAB_API bbm_status bbm_config_parse(const char* json_text, bbm_config** out);
BBMLAB_API void bbm_config_free(bbm_config* config);

/* Sets a field by dotted path, e.g. ("engine.dt", "0.005"). The value is
 * JSON text; a bare word that is not valid JSON is taken as a string. */
BBMLAB_API bbm_status bbm_config_set(bbm_config* config, const char* path, const char* value);
BBMLAB_API bbm_status bbm_config_to_json(const bbm_config* config, char** out);
BBMLAB_API bbm_status bbm_config_validate(const bbm_config* config);

/* Runs the configured command. On BBM_OK and BBM_CHECK_FAILED a report is
 * returned; otherwise *out is NULL and bbm_last_error explains why. */
BBMLAB_API bbm_status bbm_run(const bbm_config* config, bbm_report** out);
BBMLAB_API const char* bbm_report_text(const bbm_report* report);
BBMLAB_API const char* bbm_report_json(const bbm_report* report);
BBMLAB_API const char* bbm_report_manifest_hash(const bbm_report* report);
BBMLAB_API void bbm_report_free(bbm_report* report);

/* JSON array of {path, default, symbol, meaning} for every config field. */
BBMLAB_API bbm_status bbm_config_fields(char** out);
/* JSON array of verification suite names. */
BBMLAB_API bbm_status bbm_suite_names(char** out);
/* JSON array of functional catalog keys. */
BBMLAB_API bbm_status bbm_functional_keys(char** out);

/* Worker count: requested if positive, else BBM_LAB_WORKERS, else 1. */
BBMLAB_API unsigned bbm_resolve_workers(unsigned requested);

BBMLAB_API void bbm_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* BBMLAB_BBMLAB_H */
