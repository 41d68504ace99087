#ifndef LUMPGEOM_H
#define LUMPGEOM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LgStatus {
  LG_STATUS_OK = 0,
  LG_STATUS_DOMAIN = 1,
  LG_STATUS_PRECONDITION = 2,
  LG_STATUS_DIMENSION = 3,
  LG_STATUS_SINGULAR = 4,
  LG_STATUS_DIVERGENT = 5,
  LG_STATUS_QUADRATURE = 6,
  LG_STATUS_NULL_POINTER = 7,
  LG_STATUS_INVALID_ARGUMENT = 8,
  LG_STATUS_PANIC = 9,
} LgStatus;

typedef enum LgMetric {
  LG_METRIC_L2 = 0,
  LG_METRIC_FS = 1,
} LgMetric;

typedef enum LgMode {
  LG_MODE_CLOSED = 0,
  LG_MODE_QUADRATURE = 1,
} LgMode;

typedef enum LgExact {
  LG_EXACT_VOLUME = 0,
  LG_EXACT_ACTION = 1,
  LG_EXACT_ACTION_BY_PARTS = 2,
} LgExact;

// Opaque metric family handle.
typedef struct LgFamily LgFamily;

// A value with its first two `mu`-derivatives.
typedef struct LgJet2 {
  double value;
  double d1;
  double d2;
} LgJet2;

typedef struct LgCoefficients {
  double a0;
  double a1;
  double a2;
  double a3;
  double a4;
} LgCoefficients;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, empty after a success.
// The pointer stays valid until the next call into this library from the
// same thread.
const char *lg_last_error_message(void);

// Creates a family of metric `metric` on the charge-one `CP^k` lumps.
// `c1`, `c2` are the curvatures used by L2, `c` the one used by FS.
//
// # Safety
// `out` must be valid for a pointer write. Release the handle with
// [`lg_family_free`].
enum LgStatus lg_family_new(enum LgMetric metric,
                            uint32_t k,
                            double c1,
                            double c2,
                            double c,
                            struct LgFamily **out);

// # Safety
// `family` must come from [`lg_family_new`] and not be freed twice.
// Null is ignored.
void lg_family_free(struct LgFamily *family);

// The constant `B`.
//
// # Safety
// `family` must be a live handle and `out` valid for writes.
enum LgStatus lg_family_b(const struct LgFamily *family, double *out);

// The profile `A` with two derivatives.
//
// # Safety
// `family` must be a live handle and `out` valid for writes.
enum LgStatus lg_profile(const struct LgFamily *family, double mu, struct LgJet2 *out);

// # Safety
// `family` must be a live handle and `out` valid for writes.
enum LgStatus lg_coefficients(const struct LgFamily *family, double mu, struct LgCoefficients *out);

// # Safety
// `family` must be a live handle and `out` valid for writes.
enum LgStatus lg_volume_density(const struct LgFamily *family, double mu, double *out);

// The Ricci profile `C` with two derivatives.
//
// # Safety
// `family` must be a live handle and `out` valid for writes.
enum LgStatus lg_ricci_c(const struct LgFamily *family, double mu, struct LgJet2 *out);

// The constant `D`.
//
// # Safety
// `family` must be a live handle and `out` valid for writes.
enum LgStatus lg_ricci_d(const struct LgFamily *family, double *out);

// Scalar curvature from the closed expression in the coefficients.
//
// # Safety
// `family` must be a live handle and `out` valid for writes.
enum LgStatus lg_scalar_curvature(const struct LgFamily *family, double mu, double *out);

// Scalar curvature as `trace(gamma^-1 rho)` of the assembled forms.
// Finite `mu > 1` only.
//
// # Safety
// `family` must be a live handle and `out` valid for writes.
enum LgStatus lg_scalar_curvature_trace(const struct LgFamily *family, double mu, double *out);

// Total volume. `tol` is the relative quadrature tolerance and is
// checked in both modes.
//
// # Safety
// `family` must be a live handle and `out` valid for writes.
enum LgStatus lg_total_volume(const struct LgFamily *family,
                              enum LgMode mode,
                              double tol,
                              double *out);

// Einstein-Hilbert action. `Closed` evaluates
// `2^(2k+2) pi^(2k+1) (k+1) B^(2k) / (2k)!` on L2, which is half of the
// integral computed by `Quadrature`; see [`lg_eh_action_by_parts`].
//
// # Safety
// `family` must be a live handle and `out` valid for writes.
enum LgStatus lg_eh_action(const struct LgFamily *family,
                           enum LgMode mode,
                           double tol,
                           double *out);

// Closed form of `int kappa dVol` obtained by integrating by parts.
//
// # Safety
// `family` must be a live handle and `out` valid for writes.
enum LgStatus lg_eh_action_by_parts(const struct LgFamily *family, double *out);

// `int_0^1 t^2 (1 - t^2)^(k-2) dt`, exact rational
// rounded to `f64`.
//
// # Safety
// `out` must be valid for writes.
enum LgStatus lg_beta_integral(uint32_t k, double *out);

// Exact value as text, e.g. `1/120*pi^10`. Release with
// [`lg_string_free`].
//
// # Safety
// `family` must be a live handle and `out` valid for a pointer write.
enum LgStatus lg_exact_value(const struct LgFamily *family, enum LgExact which, char **out);

// # Safety
// `s` must come from this library and not be freed twice. Null is ignored.
void lg_string_free(char *s);

// Runs the verification suite on `steps` log-spaced points of
// `[mu_min, mu_max]`; writes the number of checks run and failed.
//
// # Safety
// `family` must be a live handle; the outputs valid for writes.
enum LgStatus lg_verify(const struct LgFamily *family,
                        double mu_min,
                        double mu_max,
                        uintptr_t steps,
                        uintptr_t *out_total,
                        uintptr_t *out_failed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LUMPGEOM_H */
