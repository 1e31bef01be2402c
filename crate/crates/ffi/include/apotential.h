#ifndef APOTENTIAL_H
#define APOTENTIAL_H

/* Generated by cbindgen from crates/ffi/src; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  APOT_STATUS_OK = 0,
  APOT_STATUS_NULL_POINTER = 1,
  APOT_STATUS_INVALID_UTF8 = 2,
  APOT_STATUS_DIMENSION_MISMATCH = 3,
  APOT_STATUS_INVALID_OPERATOR = 4,
  APOT_STATUS_NON_CONSTANT_RANK = 5,
  APOT_STATUS_ZERO_OPERATOR = 6,
  APOT_STATUS_NOT_A_FREE = 7,
  APOT_STATUS_NONZERO_MEAN = 8,
  APOT_STATUS_RANK_DROP = 9,
  APOT_STATUS_INVALID_GRID = 10,
  APOT_STATUS_NOT_IN_CONVEX_SET = 11,
  APOT_STATUS_NOT_PSD = 12,
  APOT_STATUS_INVALID_ARGUMENT = 13,
  APOT_STATUS_PARSE = 14,
  APOT_STATUS_IO = 15,
  APOT_STATUS_PANIC = 16,
} ApotStatus;

/**
 * Real vector field sampled on a periodic grid.
 */
typedef struct ApotField ApotField;

/**
 * Constant-coefficient homogeneous differential operator.
 */
typedef struct ApotOperator ApotOperator;

/**
 * Operator with its synthesized potential and annihilator.
 */
typedef struct ApotTriple ApotTriple;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next
 * failing call on the same thread; do not free.
 */
const char *apot_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void apot_string_free(char *s);

/**
 * Parses an operator from its JSON description {"d","k","N","m","terms"}.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
ApotStatus apot_operator_from_json(const char *json, ApotOperator **out);

/**
 * Bundled operator by name: div2, div3, symdiv2, symdiv3, curl2 or curl3.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
ApotStatus apot_operator_fixture(const char *name, ApotOperator **out);

/**
 * JSON description of an operator; free the result with [`apot_string_free`].
 *
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
ApotStatus apot_operator_to_json(const ApotOperator *op, char **out);

/**
 * # Safety
 * `op` must be NULL or a handle not yet freed.
 */
void apot_operator_free(ApotOperator *op);

/**
 * Synthesizes the potential ℒ and annihilator 𝒢 of a constant-rank operator.
 *
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
ApotStatus apot_triple_synthesize(const ApotOperator *op, ApotTriple **out);

/**
 * Loads a triple written by [`apot_triple_to_json`] or the `synth` command.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
ApotStatus apot_triple_from_json(const char *json, ApotTriple **out);

/**
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
ApotStatus apot_triple_to_json(const ApotTriple *t, char **out);

/**
 * Space dimension d, component count N and the orders k, l, g of 𝒜, ℒ, 𝒢.
 * Any out-pointer may be NULL.
 *
 * # Safety
 * `t` must be a live handle; non-NULL out-pointers must be writable.
 */
ApotStatus apot_triple_shape(const ApotTriple *t,
                             size_t *d,
                             size_t *n,
                             uint32_t *k,
                             uint32_t *l,
                             uint32_t *g);

/**
 * Checks 𝒜ℒ = 0, ℒ𝒢 = 0 and the rank counts at `samples` seeded frequencies.
 *
 * # Safety
 * `t` must be a live handle; `passed` must be writable.
 */
ApotStatus apot_triple_verify(const ApotTriple *t, size_t samples, uint64_t seed, bool *passed);

/**
 * # Safety
 * `t` must be NULL or a handle not yet freed.
 */
void apot_triple_free(ApotTriple *t);

/**
 * Field with `n` components on the grid `dims[0..d]`; `values` holds n·Π dims entries,
 * components fastest, then the first axis.
 *
 * # Safety
 * `dims` and `values` must point to `d` and `len` readable elements; `out` must be writable.
 */
ApotStatus apot_field_new(const size_t *dims,
                          size_t d,
                          size_t n,
                          const double *values,
                          size_t len,
                          ApotField **out);

/**
 * Reads an AFLD file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
ApotStatus apot_field_read(const char *path, ApotField **out);

/**
 * Writes an AFLD file atomically.
 *
 * # Safety
 * `f` must be a live handle; `path` must be a NUL-terminated string.
 */
ApotStatus apot_field_write(const ApotField *f, const char *path);

/**
 * Number of components per grid point; 0 for NULL.
 *
 * # Safety
 * `f` must be NULL or a live handle.
 */
size_t apot_field_components(const ApotField *f);

/**
 * Total number of stored values, components times grid points; 0 for NULL.
 *
 * # Safety
 * `f` must be NULL or a live handle.
 */
size_t apot_field_len(const ApotField *f);

/**
 * Copies the values into `out[0..len]`; `len` must equal [`apot_field_len`].
 *
 * # Safety
 * `f` must be a live handle; `out` must point to `len` writable doubles.
 */
ApotStatus apot_field_copy_values(const ApotField *f, double *out, size_t len);

/**
 * # Safety
 * `f` must be NULL or a handle not yet freed.
 */
void apot_field_free(ApotField *f);

/**
 * Band-limited A-free field with zero mean and unit L² norm.
 *
 * # Safety
 * `t` must be a live handle; `dims` must point to `d` values; `out` must be writable.
 */
ApotStatus apot_gen_afree(const ApotTriple *t,
                          const size_t *dims,
                          size_t d,
                          size_t band,
                          uint64_t seed,
                          ApotField **out);

/**
 * Solves ℒΦ = U, 𝒢Φ = 0 for a zero-mean A-free field U.
 *
 * # Safety
 * `t` and `u` must be live handles; `out` must be writable.
 */
ApotStatus apot_solve(const ApotTriple *t, const ApotField *u, double tol, ApotField **out);

/**
 * Grid-average L^p norm over all components.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
ApotStatus apot_lp_norm(const ApotField *f, double p, double *out);

/**
 * Runs `trials` seeded Jensen checks for det^{1/(dm−1)} on DPT fields and reports
 * the number of violations.
 *
 * # Safety
 * `violations` must be writable.
 */
ApotStatus apot_jensen_batch(size_t dm,
                             size_t grid_points,
                             size_t band,
                             double shift,
                             size_t trials,
                             uint64_t seed,
                             size_t *violations);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* APOTENTIAL_H */
