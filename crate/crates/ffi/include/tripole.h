#ifndef TRIPOLE_H
#define TRIPOLE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum TripoleStatus {
  TRIPOLE_STATUS_OK = 0,
  TRIPOLE_STATUS_NULL_POINTER = 1,
  TRIPOLE_STATUS_INVALID_ARGUMENT = 2,
  TRIPOLE_STATUS_PARSE_ERROR = 3,
  TRIPOLE_STATUS_OUTSIDE_DISK = 4,
  TRIPOLE_STATUS_VERIFICATION_FAILED = 5,
  TRIPOLE_STATUS_PANIC = 6,
  TRIPOLE_STATUS_INTERNAL = 7,
} TripoleStatus;

/**
 * Opaque field handle.
 */
typedef struct TripoleField TripoleField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a field from decimal, fractional or `a+b√3` strings for `L` and `ε`.
 *
 * # Safety
 * `l` and `eps` must be NUL-terminated strings; `out` must be writable.
 */
enum TripoleStatus tripole_field_new(const char *l, const char *eps, struct TripoleField **out);

/**
 * Creates a field from the exact values of two doubles.
 *
 * # Safety
 * `out` must be writable.
 */
enum TripoleStatus tripole_field_new_f64(double l, double eps, struct TripoleField **out);

/**
 * Adds the rigid motion `z1,z2,z3` (given as a string) to the field.
 *
 * # Safety
 * `h` must come from `tripole_field_new*`; `z` must be a NUL-terminated string.
 */
enum TripoleStatus tripole_field_set_rigid(struct TripoleField *h, const char *z);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` must be null or come from `tripole_field_new*`, and not be used afterwards.
 */
void tripole_field_free(struct TripoleField *h);

/**
 * Displacement at `(x, y)` in the closed disk.
 *
 * # Safety
 * `h` must be a live handle; `u1`, `u2` must be writable.
 */
enum TripoleStatus tripole_field_eval(const struct TripoleField *h,
                                      double x,
                                      double y,
                                      double *u1,
                                      double *u2);

/**
 * Well (1, 2, 3) at `(x, y)`; 0 on an interface, at the origin or outside the disk.
 *
 * # Safety
 * `h` must be a live handle; `well` must be writable.
 */
enum TripoleStatus tripole_field_well_index(const struct TripoleField *h,
                                            double x,
                                            double y,
                                            uint8_t *well);

/**
 * Limit value of the field at the origin.
 *
 * # Safety
 * `h` must be a live handle; `u1`, `u2` must be writable.
 */
enum TripoleStatus tripole_field_origin_value(const struct TripoleField *h, double *u1, double *u2);

/**
 * Runs every exact check up to generation `kmax`. Returns
 * `VerificationFailed` if any check fails; the counts are written either way.
 *
 * # Safety
 * `h` must be a live handle; `checks` and `failed` must be null or writable.
 */
enum TripoleStatus tripole_field_verify(const struct TripoleField *h,
                                        uint32_t kmax,
                                        size_t *checks,
                                        size_t *failed);

/**
 * The checks as a JSON array. Release the string with `tripole_string_free`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum TripoleStatus tripole_field_checks_json(const struct TripoleField *h,
                                             uint32_t kmax,
                                             char **out);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must be null or come from this library, and not be used afterwards.
 */
void tripole_string_free(char *s);

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *tripole_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRIPOLE_H */
