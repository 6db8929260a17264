#ifndef ESHG_H
#define ESHG_H

#include <stddef.h>

#if defined(_WIN32)
#define ESHG_API __declspec(dllexport)
#else
#define ESHG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eshg_status {
    ESHG_OK = 0,
    ESHG_INVALID_ARGUMENT = 1,
    ESHG_NO_SOLUTION = 2,
    ESHG_NO_CONVERGENCE = 3,
    ESHG_WRONG_REGION = 4,
    ESHG_BLOW_UP = 5,
    ESHG_DOMAIN_TOO_SHORT = 6,
    ESHG_DEGENERATE = 7,
    ESHG_INTERNAL = 99
} eshg_status;

typedef enum eshg_variant { ESHG_FULL = 0, ESHG_TRUNCATED = 1 } eshg_variant;

typedef enum eshg_region { ESHG_ORDINARY = 0, ESHG_EMBEDDED_PERMITTED = 1, ESHG_NEITHER = 2 } eshg_region;

typedef struct eshg_params eshg_params;
typedef struct eshg_profile eshg_profile;
typedef struct eshg_result eshg_result;

typedef struct eshg_va_solution {
    double A;
    double B;
    double k;
    double A2;
    double leff;
    int branch;
} eshg_va_solution;

typedef struct eshg_es_summary {
    double k_es;
    double b_at_min;
    double A;
    double B;
    double residual_max;
    eshg_region region;
} eshg_es_summary;

ESHG_API const char* eshg_version(void);

/* Message of the last failed call on this thread; empty after a success. */
ESHG_API const char* eshg_last_error(void);

ESHG_API eshg_status eshg_params_create(double delta, double q, double gamma1, double gamma2, eshg_variant variant,
                                        eshg_params** out);
ESHG_API void eshg_params_destroy(eshg_params* p);

ESHG_API eshg_status eshg_classify(const eshg_params* p, double k, eshg_region* out);
ESHG_API eshg_status eshg_tail_wavenumber(const eshg_params* p, double k, double* omega);
ESHG_API eshg_status eshg_residuals(const eshg_params* p, double k, const double state[4], double Upp, double Vpp,
                                    double* res_U, double* res_V);

/* Writes up to `capacity` physical solutions; *count receives the total. */
ESHG_API eshg_status eshg_va_solve(const eshg_params* p, double k, eshg_va_solution* out, size_t capacity,
                                   size_t* count);
ESHG_API eshg_status eshg_exact_es_wavenumber(const eshg_params* p, double* k);
ESHG_API eshg_status eshg_exact_amplitudes(const eshg_params* p, double k, double* A2, double* B);

ESHG_API eshg_status eshg_criterion_truncated(const eshg_params* p, double B, double k, double* f);
ESHG_API eshg_status eshg_criterion_full(const eshg_params* p, double A, double B, double k, double* g);
ESHG_API eshg_status eshg_locate_es_full(const eshg_params* p, double A, double B, double k_lo, double k_hi,
                                         double* roots, size_t capacity, size_t* count);
ESHG_API eshg_status eshg_sech_cos_integral(int n, double a, double* value);

/* tol and t_max may be 0 for the defaults. guess may be NULL. */
ESHG_API eshg_status eshg_shoot_ordinary(const eshg_params* p, double k, const double* guess, double tol,
                                         double t_max, eshg_profile** out);
ESHG_API eshg_status eshg_scan_embedded(const eshg_params* p, double k_lo, double k_hi, int samples,
                                        eshg_es_summary* summary, eshg_profile** profile);

ESHG_API size_t eshg_profile_size(const eshg_profile* prof);
/* column: 0 t, 1 U, 2 V, 3 Up, 4 Vp */
ESHG_API const double* eshg_profile_column(const eshg_profile* prof, int column);
ESHG_API eshg_status eshg_profile_residual(const eshg_profile* prof, double* residual);
ESHG_API eshg_status eshg_profile_write_csv(const eshg_profile* prof, const char* path);
ESHG_API void eshg_profile_destroy(eshg_profile* prof);

/* Runs a CLI subcommand with a flat "key = value" configuration. The result is
   created even on failure so the exit code and message can be read. */
ESHG_API eshg_status eshg_run_command(const char* command, const char* config_text, eshg_result** out);
ESHG_API int eshg_result_exit_code(const eshg_result* r);
ESHG_API const char* eshg_result_stdout(const eshg_result* r);
ESHG_API const char* eshg_result_stderr(const eshg_result* r);
ESHG_API void eshg_result_destroy(eshg_result* r);

#ifdef __cplusplus
}
#endif

#endif
