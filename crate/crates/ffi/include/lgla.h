#ifndef LGLA_H
#define LGLA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of `lgla_classify`.
 */
typedef enum LglaClassKind {
  LGLA_CLASS_KIND_INTEGRABLE = 0,
  LGLA_CLASS_KIND_NON_INTEGRABLE = 1,
  LGLA_CLASS_KIND_INCONCLUSIVE = 2,
} LglaClassKind;

/**
 * Result of every call.
 */
typedef enum LglaStatus {
  LGLA_STATUS_OK = 0,
  LGLA_STATUS_NULL_POINTER = 1,
  LGLA_STATUS_INVALID_UTF8 = 2,
  LGLA_STATUS_PARSE = 3,
  LGLA_STATUS_INVALID_ARGUMENT = 4,
  LGLA_STATUS_COMPUTATION = 5,
  LGLA_STATUS_PANIC = 6,
} LglaStatus;

/**
 * A structure with the radius of the box its constants are known on.
 */
typedef struct LglaStructure LglaStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build a catalog algebra (`witt`, `gen_witt`, `wpi`, `a1_1`, `a2_2`,
 * `sl2_gamma3`, `sl3_gamma8`) on the box of the given radius. `param` holds
 * the generator images for `gen_witt` (`"1,i"`) and `wpi` (`"1,0;0,i"`) and
 * may be null otherwise.
 *
 * # Safety
 * `name` and a non-null `param` must be NUL-terminated strings; `out` must
 * be valid for writes.
 */
enum LglaStatus lgla_construct(const char *name,
                               const char *param,
                               int64_t radius,
                               struct LglaStructure **out);

/**
 * Load a structure from interchange JSON; the handle's radius is the box
 * stored in the file.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum LglaStatus lgla_structure_from_json(const char *json, struct LglaStructure **out);

/**
 * Serialize a structure on its box as interchange JSON.
 *
 * # Safety
 * `h` must be a live handle; `out` must be valid for writes. The string
 * written to `out` must be released with `lgla_string_free`.
 */
enum LglaStatus lgla_structure_to_json(const struct LglaStructure *h, char **out);

/**
 * Rank of the grading group and radius of the box.
 *
 * # Safety
 * `h` must be a live handle; non-null out-pointers must be valid for writes.
 */
enum LglaStatus lgla_structure_info(const struct LglaStructure *h, size_t *rank, int64_t *radius);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void lgla_structure_free(struct LglaStructure *h);

/**
 * Number of Jacobi violations on the handle's box.
 *
 * # Safety
 * `h` must be a live handle; `count` must be valid for writes.
 */
enum LglaStatus lgla_check_jacobi(const struct LglaStructure *h, uint64_t *count);

/**
 * Classify on the handle's box. The outcome is written to `kind`; if
 * `report` is non-null it receives the full JSON report.
 *
 * # Safety
 * `h` must be a live handle; `kind` must be valid for writes; a non-null
 * `report` receives a string to be released with `lgla_string_free`.
 */
enum LglaStatus lgla_classify(const struct LglaStructure *h,
                              enum LglaClassKind *kind,
                              char **report);

/**
 * The structure constant c(λ, μ) in canonical text form (`"3/2-i"`), for
 * degrees given as `rank` coordinates each.
 *
 * # Safety
 * `lam` and `mu` must point to `rank` readable `int64_t`s; `out` must be
 * valid for writes and receives a string for `lgla_string_free`.
 */
enum LglaStatus lgla_coefficient(const struct LglaStructure *h,
                                 const int64_t *lam,
                                 const int64_t *mu,
                                 size_t rank,
                                 char **out);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void lgla_string_free(char *s);

/**
 * Description of the last failure on the calling thread ("" after a
 * successful call). The pointer stays valid until the next call on the
 * same thread.
 */
const char *lgla_last_error(void);

/**
 * Library version, a static string.
 */
const char *lgla_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LGLA_H */
