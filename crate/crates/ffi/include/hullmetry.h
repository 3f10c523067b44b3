#ifndef HULLMETRY_H
#define HULLMETRY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call. Zero means success.
 */
typedef enum HmStatus {
  HM_STATUS_OK = 0,
  HM_STATUS_NULL_POINTER = 1,
  HM_STATUS_INVALID_UTF8 = 2,
  HM_STATUS_DEGENERATE_INPUT = 3,
  HM_STATUS_NON_ORIENTABLE = 4,
  HM_STATUS_NOT_CLOSED = 5,
  HM_STATUS_DIMENSION_MISMATCH = 6,
  HM_STATUS_NONPOSITIVE_SCALE = 7,
  HM_STATUS_PARAM_OUT_OF_RANGE = 8,
  HM_STATUS_TOO_LARGE = 9,
  HM_STATUS_PRECONDITION_FAILED = 10,
  HM_STATUS_UNSUPPORTED = 11,
  HM_STATUS_INVALID_INPUT = 12,
  HM_STATUS_PANIC = 13,
} HmStatus;

/**
 * How [`hm_cloud_gamma`] evaluates γ_α.
 */
typedef enum HmGammaMethod {
  /**
   * Exhaustive; at most five points.
   */
  HM_GAMMA_METHOD_EXACT = 0,
  HM_GAMMA_METHOD_GREEDY = 1,
  HM_GAMMA_METHOD_ENTROPY_INTEGRAL = 2,
} HmGammaMethod;

/**
 * Volume ratio used by [`hm_hull_gamma`].
 */
typedef enum HmHullMode {
  HM_HULL_MODE_POLY = 0,
  HM_HULL_MODE_GENERAL = 1,
} HmHullMode;

/**
 * Opaque point cloud handle.
 */
typedef struct HmCloud HmCloud;

/**
 * Opaque polytope handle.
 */
typedef struct HmPolytope HmPolytope;

/**
 * Result of [`hm_cloud_sup_gauss`].
 */
typedef struct HmSupEstimate {
  double mean;
  double std_error;
  size_t trials;
} HmSupEstimate;

/**
 * Result of [`hm_hull_gamma`].
 */
typedef struct HmHullGamma {
  double gamma_t;
  double gamma_th;
  double l_bound;
  /**
   * Volume ratio; NaN for clouds.
   */
  double r;
  bool holds;
  bool vacuous;
} HmHullGamma;

/**
 * Result of [`hm_profile_verdict`].
 */
typedef struct HmProfileVerdict {
  bool l_exists;
  /**
   * Integral value when it converged, NaN otherwise.
   */
  double value;
  /**
   * First singular ε when divergence is interior, NaN otherwise.
   */
  double singular_eps;
} HmProfileVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *hm_version(void);

/**
 * Copies the calling thread's last error message into `buf` (always
 * NUL-terminated when `len > 0`). Returns the full message length in bytes,
 * 0 when the last call succeeded.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t hm_last_error(char *buf, size_t len);

/**
 * Builds a cloud from `n` points of dimension `dim`, row-major in `coords`.
 *
 * # Safety
 * `coords` must hold `n * dim` doubles; `out` must be writable.
 */
enum HmStatus hm_cloud_new(const double *coords, size_t n, size_t dim, struct HmCloud **out);

/**
 * Parses a cloud from JSON: `{"points": [[...], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum HmStatus hm_cloud_from_json(const char *json, struct HmCloud **out);

/**
 * # Safety
 * `cloud` must be null or a handle from this library, freed at most once.
 */
void hm_cloud_free(struct HmCloud *cloud);

/**
 * # Safety
 * `cloud` must be a live handle.
 */
size_t hm_cloud_len(const struct HmCloud *cloud);

/**
 * Parses a polytope from JSON: `{"dim", "vertices", "facets", "pieces"?}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum HmStatus hm_polytope_from_json(const char *json, struct HmPolytope **out);

/**
 * Convex hull of a cloud.
 *
 * # Safety
 * `cloud` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_cloud_hull(const struct HmCloud *cloud, struct HmPolytope **out);

/**
 * # Safety
 * `poly` must be null or a handle from this library, freed at most once.
 */
void hm_polytope_free(struct HmPolytope *poly);

/**
 * # Safety
 * `poly` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_polytope_volume(const struct HmPolytope *poly, double *out);

/**
 * Vol(hull) / Vol(P).
 *
 * # Safety
 * `poly` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_polytope_hull_ratio(const struct HmPolytope *poly, double *out);

/**
 * Normalized boundary-to-volume ratio β of a polytope.
 *
 * # Safety
 * `poly` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_polytope_beta(const struct HmPolytope *poly, double *out);

/**
 * Size of a greedy ε-cover of the cloud.
 *
 * # Safety
 * `cloud` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_cloud_cover(const struct HmCloud *cloud, double eps, size_t *out);

/**
 * γ_α of a cloud.
 *
 * # Safety
 * `cloud` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_cloud_gamma(const struct HmCloud *cloud,
                             double alpha,
                             enum HmGammaMethod method,
                             double *out);

/**
 * Monte Carlo E sup of the canonical Gaussian process on the cloud.
 * Identical seeds give identical results on any thread count.
 *
 * # Safety
 * `cloud` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_cloud_sup_gauss(const struct HmCloud *cloud,
                                 size_t trials,
                                 uint64_t seed,
                                 struct HmSupEstimate *out);

/**
 * Compares γ_α of the body with γ_α of its hull. Pass exactly one of
 * `poly` and `cloud`.
 *
 * # Safety
 * Non-null handles must be live; `out` must be writable.
 */
enum HmStatus hm_hull_gamma(const struct HmPolytope *poly,
                            const struct HmCloud *cloud,
                            double alpha,
                            enum HmHullMode mode,
                            struct HmHullGamma *out);

/**
 * Whether the hull-to-body constant exists for the entropy profile
 * ε^{-χ} |log ε|^ψ on (0, delta], with ratio constant `c`.
 *
 * # Safety
 * `out` must be writable.
 */
enum HmStatus hm_profile_verdict(double chi,
                                 double psi,
                                 double delta,
                                 double c,
                                 struct HmProfileVerdict *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HULLMETRY_H */
