/* C interface to the gmoyal exact star-product library. */

#ifndef GMOYAL_H
#define GMOYAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum GmStatus {
  GM_STATUS_OK = 0,
  GM_STATUS_NULL_POINTER = 1,
  GM_STATUS_INVALID_UTF8 = 2,
  GM_STATUS_PARSE_ERROR = 3,
  GM_STATUS_UNKNOWN_PRESET = 4,
  GM_STATUS_IO = 5,
  GM_STATUS_INVALID_ARGUMENT = 6,
  GM_STATUS_INSUFFICIENT_ORDER = 7,
  GM_STATUS_PANIC = 8,
} GmStatus;

/**
 * Target algebra of `gm_quantize_format`.
 */
typedef enum GmRep {
  GM_REP_OP = 0,
  GM_REP_AA = 1,
} GmRep;

/**
 * Opaque ordering-scheme handle. Stores the scheme itself; each operation
 * instantiates it at whatever truncation order that operation needs.
 */
typedef struct GmOrdering GmOrdering;

/**
 * Opaque phase-space polynomial handle.
 */
typedef struct GmPoly GmPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. Valid until
 * the next failing call on the same thread.
 */
const char *gm_last_error_message(void);

/**
 * Byte offset attached to the most recent parse failure, or -1.
 */
int64_t gm_last_error_position(void);

/**
 * # Safety
 * `ptr` must be NULL or a pointer previously returned through an `out`
 * string parameter of this library, not yet freed.
 */
void gm_string_free(char *ptr);

/**
 * # Safety
 * `poly` must be NULL or an unfreed handle from this library.
 */
void gm_poly_free(struct GmPoly *poly);

/**
 * # Safety
 * `ordering` must be NULL or an unfreed handle from this library.
 */
void gm_ordering_free(struct GmOrdering *ordering);

/**
 * Parse an expression in the CLI grammar into a polynomial handle.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum GmStatus gm_poly_parse(const char *src, struct GmPoly **out);

/**
 * Canonical rendering of a polynomial; re-parses to the same value.
 *
 * # Safety
 * `poly` must be a live handle; `out` must be a valid pointer.
 */
enum GmStatus gm_poly_format(const struct GmPoly *poly, char **out);

/**
 * Ordering handle from a preset name
 * (`weyl|standard|antistandard|symmetric|born_jordan`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum GmStatus gm_ordering_preset(const char *name, struct GmOrdering **out);

/**
 * Ordering handle from a custom coefficient file
 * (one `re_num/re_den,im_num/im_den` line per coefficient, leading
 * coefficient 1).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum GmStatus gm_ordering_custom_file(const char *path, struct GmOrdering **out);

/**
 * Star product of two polynomials under an ordering.
 *
 * # Safety
 * `a`, `b`, `ordering` must be live handles; `out` must be valid.
 */
enum GmStatus gm_star(const struct GmPoly *a,
                      const struct GmPoly *b,
                      const struct GmOrdering *ordering,
                      struct GmPoly **out);

/**
 * Operator image of a polynomial, rendered canonically in the chosen
 * representation.
 *
 * # Safety
 * `poly` and `ordering` must be live handles; `out` must be valid.
 */
enum GmStatus gm_quantize_format(const struct GmPoly *poly,
                                 const struct GmOrdering *ordering,
                                 enum GmRep rep,
                                 char **out);

/**
 * Truncated matrix image as JSON. With `has_hbar`, entries are evaluated
 * numerically at `hbar` and rendered as `re,im` pairs.
 *
 * # Safety
 * `poly` and `ordering` must be live handles; `out` must be valid.
 */
enum GmStatus gm_matrix_json(const struct GmPoly *poly,
                             const struct GmOrdering *ordering,
                             size_t dim,
                             bool has_hbar,
                             double hbar,
                             char **out);

/**
 * Run property suites; `suites_csv`/`orderings_csv` may be NULL for "all".
 * Writes the JSON-lines report stream and sets `out_all_passed`.
 *
 * # Safety
 * CSV arguments must be NULL or NUL-terminated strings; `out_all_passed`
 * and `out` must be valid pointers.
 */
enum GmStatus gm_verify_jsonl(const char *suites_csv,
                              const char *orderings_csv,
                              uint32_t max_degree,
                              uint32_t trials,
                              size_t dim,
                              uint64_t seed,
                              bool *out_all_passed,
                              char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GMOYAL_H */
