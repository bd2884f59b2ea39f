/*
 * thesee C interface.
 *
 * All functions return THESEE_OK (0) or a negative error code. Objects are
 * opaque handles created by *_create / *_parse / thesee_analyze and released
 * with the matching *_destroy function. Passing a destroyed or foreign handle
 * yields THESEE_ERROR_INVALID_OBJECT.
 *
 * Functions producing text use a buffer protocol: on entry *len holds the
 * capacity of buf; on return it holds the size needed including the trailing
 * NUL. When buf is NULL or too small, nothing is written and
 * THESEE_ERROR_INSUFFICIENT_BUFFER is returned.
 */
#ifndef THESEE_THESEE_H
#define THESEE_THESEE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define THESEE_API __declspec(dllexport)
#else
#define THESEE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define THESEE_API_VERSION 1

enum thesee_error_code {
  THESEE_OK = 0,
  THESEE_ERROR_PARSE = -1,
  THESEE_ERROR_DUPLICATE_THREAD_ID = -2,
  THESEE_ERROR_UNDECLARED_VARIABLE = -3,
  THESEE_ERROR_UNSUPPORTED_MODE = -4,
  THESEE_ERROR_MULTI_THREAD_INPUT = -5,
  THESEE_ERROR_PROGRAM_MISMATCH = -6,
  THESEE_ERROR_BUDGET = -7,
  THESEE_ERROR_INVALID_ARGUMENT = -8,
  THESEE_ERROR_NULL_POINTER = -9,
  THESEE_ERROR_INVALID_OBJECT = -10,
  THESEE_ERROR_INSUFFICIENT_BUFFER = -11,
  THESEE_ERROR_OVERFLOW = -12,
  THESEE_ERROR_INCONCLUSIVE = -13,
  THESEE_ERROR_INTERNAL = -20
};

typedef struct thesee_program_struct* thesee_program_t;
typedef struct thesee_config_struct* thesee_config_t;
typedef struct thesee_report_struct* thesee_report_t;

THESEE_API uint32_t thesee_api_version(void);

/* Static description of an error code. */
THESEE_API const char* thesee_error_description(int code);
/* Detailed message of the most recent failure in the calling thread ("" if none). */
THESEE_API const char* thesee_last_error_message(void);

THESEE_API int thesee_program_parse(thesee_program_t* program, const char* text, size_t len, int strict);
THESEE_API int thesee_program_destroy(thesee_program_t program);

THESEE_API int thesee_config_create(thesee_config_t* config);
THESEE_API int thesee_config_destroy(thesee_config_t config);
/* One of seq, interference, scheduled, oracle-interleave, oracle-scheduled, oracle-interference, fuzz. */
THESEE_API int thesee_config_set_mode(thesee_config_t config, const char* mode);
THESEE_API int thesee_config_set_unroll(thesee_config_t config, uint32_t unroll);
THESEE_API int thesee_config_set_widening_delay(thesee_config_t config, uint32_t rounds);
/* Comma-separated rationals, e.g. "-1,0,10,1/2". An empty string disables thresholds. */
THESEE_API int thesee_config_set_thresholds(thesee_config_t config, const char* csv);
THESEE_API int thesee_config_set_mono(thesee_config_t config, int enabled);
THESEE_API int thesee_config_set_self_interference(thesee_config_t config, const int32_t* threads, size_t count);
THESEE_API int thesee_config_set_budget_states(thesee_config_t config, uint64_t states);
THESEE_API int thesee_config_set_budget_depth(thesee_config_t config, uint64_t depth);
THESEE_API int thesee_config_set_seed(thesee_config_t config, uint64_t seed);
THESEE_API int thesee_config_set_fuzz_trials(thesee_config_t config, uint64_t trials);
THESEE_API int thesee_config_set_decreasing_pass(thesee_config_t config, int enabled);
THESEE_API int thesee_config_set_partition_cap(thesee_config_t config, uint64_t cap);
/* Analyzer mode whose alarms must cover the oracle errors; NULL clears it. */
THESEE_API int thesee_config_set_check_against(thesee_config_t config, const char* mode);
THESEE_API int thesee_config_set_timing(thesee_config_t config, int enabled);

THESEE_API int thesee_analyze(thesee_report_t* report, thesee_program_t program, thesee_config_t config);
/* Loads a report from its JSON serialization. */
THESEE_API int thesee_report_load(thesee_report_t* report, const char* json, size_t len);
THESEE_API int thesee_report_destroy(thesee_report_t report);
THESEE_API int thesee_report_json(thesee_report_t report, char* buf, size_t* len);
THESEE_API int thesee_report_text(thesee_report_t report, int color, char* buf, size_t* len);
/* 0 = no alarms, 1 = alarms or failed check, 3 = budget exhausted or inconclusive. */
THESEE_API int thesee_report_exit_code(thesee_report_t report, int* exit_code);
/* Writes a JSON object with the alarm and race inclusions between two reports. */
THESEE_API int thesee_report_diff(thesee_report_t a, thesee_report_t b, char* buf, size_t* len);

#ifdef __cplusplus
}
#endif

#endif
