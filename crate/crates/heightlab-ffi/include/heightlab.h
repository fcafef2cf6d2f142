/* C interface for heightlab. Kept in sync with src/lib.rs by hand; the
 * round-trip tests in src/tests.rs exercise every entry point. */

#ifndef HEIGHTLAB_H
#define HEIGHTLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Error codes. */
#define HL_OK 0
#define HL_ERR_NULL 1
#define HL_ERR_INPUT 2
#define HL_ERR_BUDGET 3
#define HL_ERR_PANIC 4

/* Opaque metric handle. */
typedef struct HlMetric HlMetric;

/* Message for the most recent error on this thread. Borrowed pointer, valid
 * until the next failing call on the same thread; never NULL. */
const char *hl_last_error(void);

/* kind: 0 = Weil (sup norm), 1 = Fubini-Study (l2), 2 = lp with exponent p. */
int hl_metric_new(int kind, double p, double shift, HlMetric **out);
void hl_metric_free(HlMetric *m);

/* Height of (num[0]/den[0] : ... : num[len-1]/den[len-1]): logarithmic
 * height to *h, exponential height to *big_h. */
int hl_point_height(const HlMetric *metric, const int64_t *num,
                    const int64_t *den, size_t len, double *h, double *big_h);

/* The sharp constant c_n. */
double hl_cn_constant(uint32_t n);

/* Normalized anticanonical height and masses on the projective line.
 * base: 0 = Weil, 1 = Fubini-Study; any out-pointer may be NULL. */
int hl_p1_summary(int base, double shift, double tol, double *h_hat,
                  double *complex_mass, double *real_mass);

/* Moser-Trudinger functional and Dirichlet energy of
 * a0 + sum_k (cos_c[k] cos((k+1)t) + sin_c[k] sin((k+1)t)). */
int hl_mt_functional(double a0, const double *cos_c, const double *sin_c,
                     size_t harmonics, double tol, double *mt,
                     double *dirichlet);

/* Local density mu_p of the diagonal hypersurface a[0] x0^d + ... = 0 in
 * P^{len-1} (len = n + 2 coefficients). */
int hl_local_density_diag(uint32_t d, const int64_t *a, size_t len, uint64_t p,
                          uint32_t r_max, double *mu_p, int *stabilized);

/* Minimal Weil height on the diagonal hypersurface up to the search cap.
 * *found is 1 when a point exists (then *h_min is its height); *certificate
 * is a modulus with no primitive solution, or 0 when none was detected. */
int hl_min_point_diag(uint32_t d, const int64_t *a, size_t len, double cap,
                      int *found, double *h_min, uint64_t *certificate);

#ifdef __cplusplus
}
#endif

#endif /* HEIGHTLAB_H */
