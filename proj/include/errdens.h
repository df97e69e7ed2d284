/* errdens: nonparametric estimation of the regression-error density from
 * estimated residuals.
 *
 * C interface to the errdens core. All functions return errdens_status;
 * results go through out parameters. Objects returned through
 * errdens_*_create functions are owned by the caller and released with the
 * matching _free function. errdens_last_error() returns a thread-local
 * detail message for the most recent failing call on this thread.
 */
#ifndef ERRDENS_H
#define ERRDENS_H

#include <stddef.h>

#if defined(_WIN32)
#  define ERRDENS_API __declspec(dllexport)
#else
#  define ERRDENS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum errdens_status {
  ERRDENS_OK = 0,
  ERRDENS_ERR_INVALID_ARGUMENT = 1,
  ERRDENS_ERR_DIMENSION_MISMATCH = 2,
  ERRDENS_ERR_EMPTY_NEIGHBORHOOD = 3,
  ERRDENS_ERR_ALL_TRIMMED = 4,
  ERRDENS_ERR_NO_TRIMMED_OBSERVATIONS = 5,
  ERRDENS_ERR_ZERO_CURVATURE = 6,
  ERRDENS_ERR_MALFORMED_CSV = 7,
  ERRDENS_ERR_EMPTY_FILE = 8,
  ERRDENS_ERR_IO = 9,
  ERRDENS_ERR_INTERNAL = 10
} errdens_status;

ERRDENS_API const char* errdens_status_name(errdens_status status);
ERRDENS_API const char* errdens_last_error(void);
ERRDENS_API const char* errdens_version(void);

/* ------------------------------------------------------------------ */
/* samples                                                             */

typedef struct errdens_sample errdens_sample;

/* x is row-major with n rows and d columns. */
ERRDENS_API errdens_status errdens_sample_create(const double* x, const double* y,
                                                 size_t n, size_t d,
                                                 errdens_sample** out);
/* CSV with header x1,...,xd,y. */
ERRDENS_API errdens_status errdens_sample_from_csv(const char* path,
                                                   errdens_sample** out);
ERRDENS_API void errdens_sample_free(errdens_sample* sample);
ERRDENS_API size_t errdens_sample_n(const errdens_sample* sample);
ERRDENS_API size_t errdens_sample_d(const errdens_sample* sample);

/* ------------------------------------------------------------------ */
/* kernels                                                             */

/* Product covariate kernel K0 evaluated at z (length d). */
ERRDENS_API errdens_status errdens_k0_eval(const double* z, size_t d, double* out);
/* Residual kernel K1; order in {0,1,2,3} selects the derivative. */
ERRDENS_API errdens_status errdens_k1_eval(double v, int order, double* out);

typedef struct errdens_kernel_constants {
  double integral;
  double first_moment;
  double second_moment;
  double squared_integral;
} errdens_kernel_constants;

ERRDENS_API errdens_status errdens_k0_constants(size_t d,
                                                errdens_kernel_constants* out);
ERRDENS_API errdens_status errdens_k1_constants(errdens_kernel_constants* out);

/* ------------------------------------------------------------------ */
/* regression step                                                     */

ERRDENS_API errdens_status errdens_g_hat(const errdens_sample* sample, double b0,
                                         const double* x, size_t d, double* out);
ERRDENS_API errdens_status errdens_nw_estimate(const errdens_sample* sample, double b0,
                                               const double* x, size_t d, double* out);
ERRDENS_API errdens_status errdens_nw_loo(const errdens_sample* sample, double b0,
                                          size_t i, double* out);

typedef struct errdens_residuals errdens_residuals;

/* Pass trim_lower = trim_upper = NULL for the default inner region (the
 * empirical covariate box shrunk by 10% of its width per side). */
ERRDENS_API errdens_status errdens_residuals_compute(const errdens_sample* sample,
                                                     double b0,
                                                     const double* trim_lower,
                                                     const double* trim_upper,
                                                     errdens_residuals** out);
ERRDENS_API void errdens_residuals_free(errdens_residuals* res);
ERRDENS_API size_t errdens_residuals_n(const errdens_residuals* res);
ERRDENS_API size_t errdens_residuals_trimmed_in(const errdens_residuals* res);
ERRDENS_API double errdens_residuals_b0(const errdens_residuals* res);
/* values: buffer of length n; masked-out entries are NaN. */
ERRDENS_API errdens_status errdens_residuals_values(const errdens_residuals* res,
                                                    double* values);
/* mask: buffer of length n; 1 where the residual is trimmed in. */
ERRDENS_API errdens_status errdens_residuals_mask(const errdens_residuals* res,
                                                  unsigned char* mask);

/* ------------------------------------------------------------------ */
/* density estimators                                                  */

/* grid must be strictly increasing; values receives n_grid entries. */
ERRDENS_API errdens_status errdens_two_step_density(const errdens_residuals* res,
                                                    double b1, const double* grid,
                                                    size_t n_grid, double* values);
ERRDENS_API errdens_status errdens_oracle_density(const double* errors,
                                                  const unsigned char* mask, size_t n,
                                                  double b1, const double* grid,
                                                  size_t n_grid, double* values);
ERRDENS_API errdens_status errdens_naive_conditional_density(
  const errdens_sample* sample, double b0, double h0, double h1, const double* x,
  size_t d, const double* grid, size_t n_grid, double* values);

/* ------------------------------------------------------------------ */
/* bandwidth rules                                                     */

ERRDENS_API errdens_status errdens_rn_risk(double b0, double b1, double n, int d,
                                           double* out);
ERRDENS_API errdens_status errdens_amse_b1(double b1, double n, double* out);
ERRDENS_API errdens_status errdens_b0_star(double n, int d, double b1, double c0,
                                           double* out);
ERRDENS_API errdens_status errdens_b1_star_rate(double n, int d, double c1,
                                                double* out);
ERRDENS_API errdens_status errdens_b1_amise_plugin(double f2_sq_integral,
                                                   const errdens_kernel_constants* k1,
                                                   double p_in_region, double n,
                                                   double* out);
ERRDENS_API errdens_status errdens_rn_argmin_numeric(double n, int d, double b1,
                                                     double* out);

typedef struct errdens_a11_report {
  double n_b0_pow_d_plus_4;
  double n_b0_pow4_b1;
  double n_b0_pow_d_b1_cubed;
  double clt_growth_exponent;
  int regime; /* 0 satisfied, 1 boundary, 2 violated */
} errdens_a11_report;

ERRDENS_API errdens_status errdens_check_a11(double b0, double b1, double n, int d,
                                             errdens_a11_report* out);

/* ------------------------------------------------------------------ */
/* full runs                                                           */

/* Executes one run with the same semantics as the command line tool:
 * key=value pairs from config_path (optional, may be NULL), then the
 * override arrays (keys[i] = values[i], n_overrides entries). Writes
 * <output>.csv and <output>.meta.json per the resolved configuration. */
ERRDENS_API errdens_status errdens_run(const char* config_path,
                                       const char* const* override_keys,
                                       const char* const* override_values,
                                       size_t n_overrides);

#ifdef __cplusplus
}
#endif

#endif /* ERRDENS_H */
