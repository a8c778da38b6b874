/* C interface of the plgcirmap conformal mapping library. */

#ifndef PLGCIRMAP_H
#define PLGCIRMAP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Evaluation directions of `plg_map_eval`.
 */
typedef enum PlgDirection {
  /**
   * `f`: polygonal domain to circular domain.
   */
  PLG_DIRECTION_FORWARD = 0,
  /**
   * `f⁻¹`: circular domain to polygonal domain.
   */
  PLG_DIRECTION_INVERSE = 1,
} PlgDirection;

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum PlgStatus {
  /**
   * Success.
   */
  PLG_STATUS_OK = 0,
  /**
   * A pointer argument was null or an argument value was out of range.
   */
  PLG_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The input domain violates the geometric preconditions.
   */
  PLG_STATUS_INVALID_GEOMETRY = 2,
  /**
   * The iterative solver did not converge.
   */
  PLG_STATUS_NO_CONVERGENCE = 3,
  /**
   * I/O, encoding, or schema failure.
   */
  PLG_STATUS_IO_ERROR = 4,
  /**
   * Internal panic; the library state is still valid.
   */
  PLG_STATUS_INTERNAL = 5,
} PlgStatus;

/**
 * Opaque handle to a computed conformal map.
 */
typedef struct PlgMap PlgMap;

/**
 * Solver configuration; obtain defaults from `plg_config_default`.
 */
typedef struct PlgConfig {
  /**
   * Nodes per polygon side (even, >= 4).
   */
  uintptr_t n;
  /**
   * Corner-grading exponent (>= 2).
   */
  uint32_t grading_p;
  double gmres_tol;
  uintptr_t gmres_maxit;
  double koebe_tol;
  uintptr_t koebe_maxit;
  /**
   * 0 = automatic, 1..4 = the eq1..eq4 normalization conditions.
   */
  uint32_t normalization;
  /**
   * Trusted-evaluation margin; <= 0 selects the default.
   */
  double delta;
} PlgConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread.  The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *plg_last_error_message(void);

/**
 * Default solver configuration.
 */
struct PlgConfig plg_config_default(void);

/**
 * Compute a conformal map from a domain described by JSON.
 *
 * On success `*out` owns a new map handle.
 *
 * # Safety
 * `domain_json` must be a valid NUL-terminated string; `cfg` may be null
 * (defaults are used); `out` must be a valid pointer.
 */
enum PlgStatus plg_map_compute(const char *domain_json,
                               const struct PlgConfig *cfg,
                               struct PlgMap **out);

/**
 * Deserialize a map previously produced by `plg_map_to_json`.
 *
 * # Safety
 * `map_json` must be a valid NUL-terminated string; `out` must be valid.
 */
enum PlgStatus plg_map_from_json(const char *map_json, struct PlgMap **out);

/**
 * Serialize a map to its JSON form.  The returned string must be released
 * with `plg_string_free`.
 *
 * # Safety
 * `map` must be a live handle; `out` must be valid.
 */
enum PlgStatus plg_map_to_json(const struct PlgMap *map, char **out);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must come from `plg_map_to_json` and not have been freed before.
 */
void plg_string_free(char *s);

/**
 * Release a map handle.
 *
 * # Safety
 * `map` must come from this library and not have been freed before.
 */
void plg_map_free(struct PlgMap *map);

/**
 * Number of boundary components; 0 for a null handle.
 *
 * # Safety
 * `map` must be a live handle or null.
 */
uintptr_t plg_map_connectivity(const struct PlgMap *map);

/**
 * Centers (interleaved, `2m` doubles) and radii (`m` doubles) of the
 * circular domain.  Either output pointer may be null to skip it.
 *
 * # Safety
 * `map` must be a live handle; non-null outputs must have the capacities
 * stated above for `m = plg_map_connectivity(map)`.
 */
enum PlgStatus plg_map_circles(const struct PlgMap *map, double *centers, double *radii);

/**
 * Evaluate the map (or its first derivative when `deriv` is nonzero) at
 * `count` points.  `points` and `values` are interleaved arrays of
 * `2*count` doubles; points outside the region produce NaN pairs, and
 * their number is written to `*outside_count` when non-null.
 *
 * # Safety
 * `map` must be a live handle; `points` and `values` must hold `2*count`
 * doubles each.
 */
enum PlgStatus plg_map_eval(const struct PlgMap *map,
                            enum PlgDirection direction,
                            int32_t deriv,
                            const double *points,
                            uintptr_t count,
                            double *values,
                            uintptr_t *outside_count);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PLGCIRMAP_H */
