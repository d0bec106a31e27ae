#ifndef QFLAT_H
#define QFLAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum QflatCode {
  QFLAT_CODE_OK = 0,
  QFLAT_CODE_NULL_POINTER = 1,
  QFLAT_CODE_INVALID_INPUT = 2,
  QFLAT_CODE_NOT_POSITIVE_DEFINITE = 3,
  QFLAT_CODE_PRECONDITION_FAILED = 4,
  QFLAT_CODE_BUDGET_EXCEEDED = 5,
  QFLAT_CODE_INTERNAL = 6,
} QflatCode;

/**
 * Outcome of a named check.
 */
typedef enum QflatStatus {
  QFLAT_STATUS_PASS = 0,
  QFLAT_STATUS_FAIL = 1,
  QFLAT_STATUS_BUDGET_EXCEEDED = 3,
} QflatStatus;

/**
 * Opaque lattice handle.
 */
typedef struct QflatLattice QflatLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call on the same thread.
 */
const char *qflat_last_error(void);

/**
 * Builds a lattice from a row-major `n`×`n` Gram matrix.
 *
 * # Safety
 * `entries` must point to `n*n` readable values and `out` must be writable.
 */
enum QflatCode qflat_lattice_new(const int64_t *entries, size_t n, struct QflatLattice **out);

/**
 * Parses a lattice from the JSON (`{"gram": [[..]]}`) or text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` must be writable.
 */
enum QflatCode qflat_lattice_parse(const char *text, struct QflatLattice **out);

/**
 * # Safety
 * `l` must come from this library and not be freed yet; NULL is ignored.
 */
void qflat_lattice_free(struct QflatLattice *l);

/**
 * # Safety
 * `l` must be a live handle.
 */
size_t qflat_lattice_rank(const struct QflatLattice *l);

/**
 * Whether `l` has a vector of norm `n`. When it does and `vector` is not
 * NULL, the vector's `rank` coordinates are written there. A `budget_limit` of 0
 * means the default.
 *
 * # Safety
 * `l` must be a live handle, `represented` writable, and `vector` NULL or
 * writable for `qflat_lattice_rank(l)` values.
 */
enum QflatCode qflat_represents_integer(const struct QflatLattice *l,
                                        int64_t n,
                                        uint64_t budget_limit,
                                        bool *represented,
                                        int64_t *vector);

/**
 * Whether `source` embeds isometrically in `target`. When it does and
 * `matrix` is not NULL, the row-major target-rank × source-rank embedding
 * is written there. A `budget_limit` of 0 means the default.
 *
 * # Safety
 * Both handles must be live, `represented` writable, and `matrix` NULL or
 * writable for rank(target)·rank(source) values.
 */
enum QflatCode qflat_represents_lattice(const struct QflatLattice *target,
                                        const struct QflatLattice *source,
                                        uint64_t budget_limit,
                                        bool *represented,
                                        int64_t *matrix);

/**
 * Reduces `[[a,b],[b,c]]`; writes the reduced `(a,b,c)` to `out[0..3]` and
 * the row-major transform to `transform[0..4]` when not NULL.
 *
 * # Safety
 * `out` must be writable for 3 values and `transform` NULL or writable for 4.
 */
enum QflatCode qflat_reduce_binary(int64_t a,
                                   int64_t b,
                                   int64_t c,
                                   int64_t *out,
                                   int64_t *transform);

/**
 * Runs a named check with its default parameters and returns the JSON
 * report in `json` (free with [`qflat_string_free`]).
 *
 * # Safety
 * `claim` must be a NUL-terminated string; `status` and `json` writable.
 */
enum QflatCode qflat_verify_claim(const char *claim, enum QflatStatus *status, char **json);

/**
 * # Safety
 * `s` must come from this library and not be freed yet; NULL is ignored.
 */
void qflat_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QFLAT_H */
