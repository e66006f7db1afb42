/* C interface to the deformed-Xi library.
 *
 * All functions return a dxi_status; on failure the message is available
 * from dxi_last_error() on the calling thread until the next call.
 * Strings handed out by the library are released with dxi_string_free. */
#ifndef DXI_H
#define DXI_H

#include <stddef.h>

#if defined(DXI_BUILDING_LIBRARY)
#define DXI_API __attribute__((visibility("default")))
#else
#define DXI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  DXI_OK = 0,
  DXI_ERR_DOMAIN = 1,
  DXI_ERR_UNSUPPORTED_ORDER = 2,
  DXI_ERR_NONCONVERGENCE = 3,
  DXI_ERR_SINGULAR = 4,
  DXI_ERR_DEGENERATE = 5,
  DXI_ERR_PARSE = 6,
  DXI_ERR_INVALID_ARGUMENT = 7, /* null pointers, bad sizes */
  DXI_ERR_INTERNAL = 8
} dxi_status;

typedef struct {
  double re;
  double im;
} dxi_complex;

typedef struct dxi_context dxi_context;

/* Reads XI_QUAD_TOL (absolute quadrature tolerance) from the environment;
 * an unparsable or non-positive value fails with DXI_ERR_PARSE. */
DXI_API dxi_status dxi_context_create(dxi_context** out);
DXI_API void dxi_context_destroy(dxi_context* ctx);
/* 0 restores the per-dimension default. */
DXI_API dxi_status dxi_context_set_abs_tol(dxi_context* ctx, double abs_tol);
DXI_API dxi_status dxi_context_set_rel_tol(dxi_context* ctx, double rel_tol);
DXI_API dxi_status dxi_context_set_max_panels(dxi_context* ctx, int max_panels);
/* Effective absolute tolerance for a d-dimensional evaluation. */
DXI_API double dxi_context_abs_tol(const dxi_context* ctx, int d);

DXI_API const char* dxi_last_error(void);
DXI_API const char* dxi_status_name(dxi_status s);
DXI_API const char* dxi_version(void);
DXI_API void dxi_string_free(char* s);

typedef enum {
  DXI_FAMILY_XI = 0,       /* Xi_rho(s); rho 1x1, one s */
  DXI_FAMILY_XI_TILDE = 1, /* M[(H_4 Psi) e](s/2) */
  DXI_FAMILY_XI_M = 2,     /* sum_{l=0}^{m} Xi_rho(s + l) */
  DXI_FAMILY_XI_D = 3,     /* Xi(rho, s), rho d x d, d <= 3 */
  DXI_FAMILY_JENSEN = 4    /* the Delta_4 (Jensen) variant of XI_D */
} dxi_family;

typedef struct {
  dxi_complex value;
  double quad_error;
  long long evaluations;
  int precision_warning;
} dxi_value;

/* rho is dim x dim, row-major; s has dim entries.  m is used by XI_M only. */
DXI_API dxi_status dxi_eval(dxi_context* ctx, dxi_family family, const dxi_complex* rho, int dim,
                            const dxi_complex* s, int m, dxi_value* out);

/* Identity verification.  The request is a JSON object
 *   {"id": "telescope", "rho": 0.5 | [[...]], "s": [..], "extras": {"m": 0}, "tol": 1e-9}
 * with complex numbers as [re, im] or plain numbers; "seed": n without "rho"
 * draws hypothesis-satisfying parameters.  *report_json receives the report
 * (also the partial one on DXI_ERR_NONCONVERGENCE) and *pass its verdict. */
DXI_API dxi_status dxi_verify_json(dxi_context* ctx, const char* request_json, char** report_json,
                                   int* pass);
DXI_API dxi_status dxi_report_csv(const char* report_json, char** csv_row);
DXI_API const char* dxi_report_csv_header(void);

DXI_API int dxi_identity_count(void);
DXI_API const char* dxi_identity_name(int index);

typedef struct {
  dxi_complex s;
  int k;
  int branch;
  double residual; /* |confirmation combination| at s */
} dxi_zero_row;

/* family: "telescope", "tilde", "funcor1", "funcor2".  Rows for k in
 * [k_lo, k_hi]; free with dxi_zero_rows_free. */
DXI_API dxi_status dxi_candidate_zeros(dxi_context* ctx, const char* family, const dxi_complex* rho,
                                       int dim, int m, int k_lo, int k_hi, dxi_zero_row** rows,
                                       size_t* count);
DXI_API void dxi_zero_rows_free(dxi_zero_row* rows);

/* Sign changes of Xi_rho(1/2 + iy) + sign * Xi_rho(1/2 - iy) for y in (0, y_max]
 * (real rho; the sum is real, the difference imaginary there).  Both are
 * bounded by 2|Xi_rho(1/2 + iy)|, so the scan stops where that envelope stays
 * below 1e-10 of its value at y = 0 (for the difference, which equals the
 * telescope closed form, where e^{-y^2/16rho} does); the length actually
 * scanned goes to *y_used. */
DXI_API dxi_status dxi_critical_zeros(dxi_context* ctx, double rho, int sign, double y_max,
                                      int grid, double** ys, size_t* count, double* y_used);
DXI_API void dxi_doubles_free(double* v);

typedef struct {
  dxi_complex sinh_coeff;
  dxi_complex cosh_coeff;
  dxi_complex integral_part;
  dxi_complex total;
  dxi_complex target; /* e^{(-s^2+s)/16rho} Xi_rho(s) by direct quadrature */
  dxi_complex a_plus;
  dxi_complex a_minus;
  dxi_complex tilde_total;
  dxi_complex tilde_target;
} dxi_decomposition;

DXI_API dxi_status dxi_decompose(dxi_context* ctx, dxi_complex rho, dxi_complex s,
                                 dxi_decomposition* out);

#ifdef __cplusplus
}
#endif

#endif
