/* C interface to the biharmonic beam toolkit.
 *
 * Every function returns a bh_status. On failure, bh_last_error() gives a
 * message for the calling thread, valid until the next call on that thread.
 * Handles are opaque and must be released with their *_free function. */
#ifndef BIHARM_BIHARM_H
#define BIHARM_BIHARM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#pragma GCC visibility push(default)
#endif

typedef enum bh_status {
  BH_OK = 0,
  BH_ERR_ARGUMENT = 1,
  BH_ERR_CONFIG = 2,
  BH_ERR_PROFILE = 3,
  BH_ERR_NUMERICAL = 4,
  BH_ERR_CONDITIONING = 5,
  BH_ERR_RESAMPLING = 6,
  BH_ERR_IO = 7,
  BH_ERR_INTERNAL = 99
} bh_status;

typedef struct bh_profile bh_profile;
typedef struct bh_operator bh_operator;
typedef struct bh_spectrum bh_spectrum;
typedef struct bh_control bh_control;

const char* bh_version(void);
const char* bh_last_error(void);

/* Process exit code conventionally associated with a status. */
int bh_exit_code(bh_status status);

/* ---- coefficient profiles ---- */

/* Coefficients as polynomials a0 + a1 x + ...; q may be NULL (q = 0). */
bh_status bh_profile_polynomial(double length, const double* rho, size_t rho_len, const double* sigma,
                                size_t sigma_len, const double* q, size_t q_len, bh_profile** out);
void bh_profile_free(bh_profile* profile);

bh_status bh_profile_eval(const bh_profile* profile, double x, double* rho, double* sigma, double* q);

/* gamma = int_0^l (rho/sigma)^{1/4} dx and its error estimate. */
bh_status bh_geometry_gamma(const bh_profile* profile, double* gamma, double* error_estimate);

/* ---- discretization ---- */

bh_status bh_assemble(const bh_profile* profile, int elements, bh_operator** out);
void bh_operator_free(bh_operator* op);
int bh_operator_dofs(const bh_operator* op);

/* ---- spectrum ---- */

bh_status bh_spectrum_solve(const bh_operator* op, int count, bh_spectrum** out);
void bh_spectrum_free(bh_spectrum* spectrum);

int bh_spectrum_size(const bh_spectrum* spectrum);
int bh_spectrum_trusted(const bh_spectrum* spectrum);

/* Copies min(capacity, size) values; n is 0-based. */
bh_status bh_spectrum_lambdas(const bh_spectrum* spectrum, double* out, size_t capacity);
bh_status bh_spectrum_traces(const bh_spectrum* spectrum, double* out, size_t capacity);
bh_status bh_spectrum_residuals(const bh_spectrum* spectrum, double* out, size_t capacity);

/* Runs the positivity, simplicity, trace and orthonormality checks. */
bh_status bh_spectrum_validate(const bh_spectrum* spectrum, int* passed, int* failures);

/* ---- asymptotics ---- */

/* First count positive roots of cos(mu gamma) cosh(mu gamma) = 1. */
bh_status bh_characteristic_roots(double gamma, int count, double* out);

/* ---- observability ---- */

typedef struct bh_observability {
  double T;
  int N;
  double c_T;
  double C_T;
  double condition;
  double density;
  int resolution_failure;
} bh_observability;

bh_status bh_observability_constants(const bh_spectrum* spectrum, double T, int N, bh_observability* out);

/* ---- null control ---- */

typedef enum bh_control_method { BH_CONTROL_HUM = 0, BH_CONTROL_MOMENT = 1 } bh_control_method;

/* Drives the modal state with coefficients (re[k], im[k]), k < count, to zero
 * at time T. gram_cap <= 0 selects the default cap. */
bh_status bh_control_synthesize(const bh_spectrum* spectrum, const double* re, const double* im, size_t count,
                                double T, bh_control_method method, double gram_cap, bh_control** out);
void bh_control_free(bh_control* control);

double bh_control_norm(const bh_control* control);
double bh_control_residual(const bh_control* control);
double bh_control_gram_condition(const bh_control* control);

/* f(t) = re_f + i im_f. */
bh_status bh_control_evaluate(const bh_control* control, double t, double* re_f, double* im_f);

/* ---- experiment runner ---- */

/* Parses a config text and runs it, writing artifacts to out_dir (NULL keeps
 * the directory named in the config). If summary is non-NULL it receives a
 * malloc'd human-readable report the caller frees with bh_free_string. */
bh_status bh_run_config(const char* config_text, const char* out_dir, int threads, char** summary);

/* As bh_run_config, but fails with BH_ERR_CONFIG unless the config's kind equals kind. */
bh_status bh_run_config_kind(const char* config_text, const char* kind, const char* out_dir, int threads,
                             char** summary);

void bh_free_string(char* text);

#if defined(__GNUC__)
#pragma GCC visibility pop
#endif

#ifdef __cplusplus
}
#endif

#endif
