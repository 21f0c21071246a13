#ifndef LOCALZETA_H
#define LOCALZETA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes of the C interface.
 */
typedef enum LzStatus {
  /**
   * Success.
   */
  Ok = 0,
  /**
   * A pole of the evaluated quantity; no value was produced.
   */
  Pole = 1,
  /**
   * Invalid argument (domain error, unknown label, bad configuration).
   */
  InvalidArgument = 2,
  /**
   * A required pointer argument was NULL.
   */
  NullArgument = 3,
  /**
   * Evaluation was refused (odd character on a half-integral coefficient).
   */
  Refused = 4,
  /**
   * Internal numerical failure.
   */
  Numerical = 5,
} LzStatus;

/**
 * Opaque formal gamma product.
 */
typedef struct LzGammaProduct LzGammaProduct;

/**
 * Opaque verification report.
 */
typedef struct LzReport LzReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Real-place gamma factor gamma(chi, s, psi) for chi = sgn^parity |.|^{z}
 * and psi(x) = exp(i hbar x). Writes the value to (out_re, out_im).
 */
enum LzStatus lz_gamma_real(uint32_t parity,
                            double z_re,
                            double z_im,
                            double s_re,
                            double s_im,
                            double hbar,
                            double *out_re,
                            double *out_im);

/**
 * Unramified p-adic gamma factor for chi = |.|_p^{z}.
 */
enum LzStatus lz_gamma_padic(uint64_t p,
                             double z_re,
                             double z_im,
                             double s_re,
                             double s_im,
                             double *out_re,
                             double *out_im);

/**
 * Build the scattering scalar mu_X for a case label of the rank-one table
 * (A1, An, Bn, Cn, F4, G2, D2, Dn, D4pp, B3pp). The handle must be freed
 * with `lz_product_free`.
 */
enum LzStatus lz_mu_x_new(const char *label, struct LzGammaProduct **out);

/**
 * Number of gamma atoms in a product.
 */
enum LzStatus lz_product_len(const struct LzGammaProduct *prod, uintptr_t *out);

/**
 * Evaluate a product at the even unitary spectral character |.|^{i t} and
 * the standard psi.
 */
enum LzStatus lz_product_eval_unitary(const struct LzGammaProduct *prod,
                                      double t,
                                      double *out_re,
                                      double *out_im);

/**
 * Replace psi by psi(a .) in a product, returning a new handle.
 */
enum LzStatus lz_product_rescale_psi(const struct LzGammaProduct *prod,
                                     double a,
                                     struct LzGammaProduct **out);

/**
 * Cancel inverse pairs, returning a new handle.
 */
enum LzStatus lz_product_simplify(const struct LzGammaProduct *prod, struct LzGammaProduct **out);

/**
 * Release a product handle.
 */
void lz_product_free(struct LzGammaProduct *prod);

/**
 * Run a named suite (gamma, scattering, transfer, hankel, symplectic, all)
 * and return a report handle. `slow` enables the GL_3 checks.
 */
enum LzStatus lz_run_suite(const char *name, uint64_t seed, bool slow, struct LzReport **out);

/**
 * Counts of (total, pass, fail, inconclusive) checks in a report.
 */
enum LzStatus lz_report_counts(const struct LzReport *report,
                               uintptr_t *total,
                               uintptr_t *pass,
                               uintptr_t *fail,
                               uintptr_t *inconclusive);

/**
 * Serialize a report as JSON into a caller buffer; writes the required
 * length to `len` (including the NUL terminator). When `buf` is NULL only
 * the length is reported.
 */
enum LzStatus lz_report_json(const struct LzReport *report,
                             char *buf,
                             uintptr_t cap,
                             uintptr_t *len);

/**
 * Release a report handle.
 */
void lz_report_free(struct LzReport *report);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LOCALZETA_H */
