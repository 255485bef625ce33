/* C interface to the ustat library. All functions return USTAT_OK (0) or an
 * error code; the message of the last failure on the calling thread is
 * available from ustat_last_error(). Handles are opaque and owned by the
 * caller, who releases them with the matching _free function. */
#ifndef USTAT_H
#define USTAT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define USTAT_API __declspec(dllexport)
#else
#define USTAT_API __attribute__((visibility("default")))
#endif

enum {
    USTAT_OK = 0,
    USTAT_E_IO = 1,
    USTAT_E_PARSE,
    USTAT_E_SHAPE,
    USTAT_E_EMPTY_SERIES,
    USTAT_E_ORDER_EXCEEDS_N,
    USTAT_E_UNSUPPORTED_ORDER,
    USTAT_E_SIZE_GUARD,
    USTAT_E_DIMENSION_MISMATCH,
    USTAT_E_DEGENERATE_COLUMN,
    USTAT_E_SINGULAR_DESIGN,
    USTAT_E_NON_CONVERGENCE,
    USTAT_E_INVALID_RESPONSE,
    USTAT_E_INVALID_DF,
    USTAT_E_P_TOO_SMALL,
    USTAT_E_ZERO_VARIANCE,
    USTAT_E_EMPTY_SET,
    USTAT_E_ZERO_PVALUE,
    USTAT_E_NOT_POSITIVE_DEFINITE,
    USTAT_E_INVALID_PARAMETERS,
    USTAT_E_INVALID_SPARSITY,
    USTAT_E_INVALID_ARGUMENT,
    USTAT_E_INTERNAL = 99
};

typedef struct ustat_matrix ustat_matrix;
typedef struct ustat_report ustat_report;

USTAT_API const char* ustat_version(void);
USTAT_API const char* ustat_last_error(void);
USTAT_API const char* ustat_error_name(int code);
/* 1 when the code describes bad input (CLI exit 2), 0 for numeric failures (exit 3) */
USTAT_API int ustat_error_is_validation(int code);
USTAT_API uint64_t ustat_entropy_seed(void);

/* matrices */
USTAT_API int ustat_matrix_from_csv(const char* path, int has_header, ustat_matrix** out);
/* row-major n x p copy */
USTAT_API int ustat_matrix_from_data(const double* values, size_t n, size_t p, ustat_matrix** out);
USTAT_API size_t ustat_matrix_rows(const ustat_matrix* m);
USTAT_API size_t ustat_matrix_cols(const ustat_matrix* m);
USTAT_API void ustat_matrix_free(ustat_matrix* m);

/* Single statistics. order >= 1; mean_mode 0 known-zero, 1 unknown, 2 exact. */
USTAT_API int ustat_cov1_stat(const ustat_matrix* m, int order, int mean_mode, double* value, double* variance);
USTAT_API int ustat_distinct_sums(const double* s, size_t n, int a_max, double* out);

/* Runs driven by a JSON config (the "config" object of a report, or a whole
 * report). ustat_test reads its data from the config's input paths. */
USTAT_API int ustat_test(const char* config_json, ustat_report** out);
/* As ustat_test with data passed in memory; y, z, response may be NULL. */
USTAT_API int ustat_test_data(const char* config_json, const ustat_matrix* x, const ustat_matrix* y,
                              const ustat_matrix* z, const double* response, size_t response_len,
                              ustat_report** out);
USTAT_API int ustat_simulate(const char* config_json, int threads, ustat_report** out);
USTAT_API int ustat_plan(const char* config_json, ustat_report** out);

/* threads for ustat_test / ustat_test_data; 0 uses every core */
USTAT_API void ustat_set_threads(int threads);

USTAT_API const char* ustat_report_json(const ustat_report* r);
USTAT_API const char* ustat_report_tsv(const ustat_report* r);
USTAT_API size_t ustat_report_warning_count(const ustat_report* r);
USTAT_API const char* ustat_report_warning(const ustat_report* r, size_t i);
USTAT_API void ustat_report_free(ustat_report* r);

#ifdef __cplusplus
}
#endif

#endif
