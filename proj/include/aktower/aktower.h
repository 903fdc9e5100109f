#ifndef AKTOWER_H
#define AKTOWER_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(AKTOWER_BUILDING_LIBRARY)
#define AKTOWER_API __attribute__((visibility("default")))
#else
#define AKTOWER_API
#endif

typedef enum aktower_status {
  AKTOWER_OK = 0,
  AKTOWER_ERR_INVALID_ARGUMENT = 1,
  AKTOWER_ERR_DOMAIN = 2,
  AKTOWER_ERR_BOUNDS = 3,
  AKTOWER_ERR_COMPOSITION = 4,
  AKTOWER_ERR_NON_INVERTIBLE = 5,
  AKTOWER_ERR_NUMERIC = 6,
  AKTOWER_ERR_PRECISION = 7,
  AKTOWER_ERR_CONSTRUCTION = 8,
  AKTOWER_ERR_PARAMETER = 9,
  AKTOWER_ERR_CAPACITY = 10,
  AKTOWER_ERR_TARGET = 11,
  AKTOWER_ERR_PARSE = 12,
  AKTOWER_ERR_IO = 13,
  AKTOWER_ERR_INTERNAL = 99
} aktower_status;

typedef struct aktower_config aktower_config;
typedef struct aktower_tower aktower_tower;

AKTOWER_API const char* aktower_status_name(aktower_status status);
/* Message of the last failing call on this thread; empty if none. */
AKTOWER_API const char* aktower_last_error(void);
/* Strings returned through char** out-parameters are owned by the caller. */
AKTOWER_API void aktower_string_free(char* s);

AKTOWER_API aktower_status aktower_config_new(aktower_config** out);
AKTOWER_API void aktower_config_free(aktower_config* cfg);
AKTOWER_API aktower_status aktower_config_set_target(aktower_config* cfg, const char* target);
/* "p/q", an integer or a decimal, in [0, 1]. */
AKTOWER_API aktower_status aktower_config_set_beta(aktower_config* cfg, const char* beta);
/* "strict" or "relaxed". */
AKTOWER_API aktower_status aktower_config_set_mode(aktower_config* cfg, const char* mode);
/* Decimal integer; NULL removes the cap. */
AKTOWER_API aktower_status aktower_config_set_q_cap(aktower_config* cfg, const char* q_cap);
AKTOWER_API aktower_status aktower_config_set_stages(aktower_config* cfg, int stages);
AKTOWER_API aktower_status aktower_config_set_precision(aktower_config* cfg, unsigned bits);
AKTOWER_API aktower_status aktower_config_set_sample_density(aktower_config* cfg, int density);

/* On AKTOWER_ERR_CONSTRUCTION, *failure_json (if non-NULL) receives the
   condition report of the stage that could not be built. */
AKTOWER_API aktower_status aktower_tower_build(const aktower_config* cfg, aktower_tower** out, char** failure_json);
AKTOWER_API aktower_status aktower_tower_load(const char* path, aktower_tower** out);
AKTOWER_API aktower_status aktower_tower_save(const aktower_tower* t, const char* path, int with_timestamp);
AKTOWER_API aktower_status aktower_tower_to_json(const aktower_tower* t, int with_timestamp, char** out);
AKTOWER_API void aktower_tower_free(aktower_tower* t);

AKTOWER_API aktower_status aktower_tower_depth(const aktower_tower* t, int* out);
AKTOWER_API aktower_status aktower_tower_precision(const aktower_tower* t, unsigned* out);
AKTOWER_API aktower_status aktower_tower_rotation_only(const aktower_tower* t, int* out);
/* tau_n = p/q and s_n as exact "p/q" strings, delta_n in decimal. */
AKTOWER_API aktower_status aktower_stage_tau(const aktower_tower* t, int n, char** out);
AKTOWER_API aktower_status aktower_stage_s(const aktower_tower* t, int n, char** out);
AKTOWER_API aktower_status aktower_stage_delta(const aktower_tower* t, int n, unsigned digits, char** out);

/* Point arguments are decimal strings parsed at the tower precision. */
AKTOWER_API aktower_status aktower_eval_h(const aktower_tower* t, int k, const char* x, int inverse, unsigned digits,
                                          char** out);
AKTOWER_API aktower_status aktower_eval_f(const aktower_tower* t, int n, const char* x, unsigned digits, char** out);
AKTOWER_API aktower_status aktower_rotation_number(const aktower_tower* t, int n, const char* x, long iterations,
                                                   unsigned digits, char** value, char** error_bar);

/* *ok is 1 when no invariant failed. The report is text, or JSON when as_json. */
AKTOWER_API aktower_status aktower_verify(const aktower_tower* t, uint64_t seed, int samples, int as_json,
                                          int with_timestamp, int* ok, char** report);

/* Dimension estimators on the deepest distribution function. */
AKTOWER_API aktower_status aktower_dim(const aktower_tower* t, uint64_t seed, size_t points_per_stage,
                                       char** report_json, char** rows_csv, char** curves_csv);

#ifdef __cplusplus
}
#endif

#endif
