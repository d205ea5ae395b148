#ifndef TENSOR_EXTREMAL_H
#define TENSOR_EXTREMAL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum {
  TE_STATUS_OK = 0,
  TE_STATUS_NULL_POINTER = 1,
  TE_STATUS_INVALID_UTF8 = 2,
  TE_STATUS_PARSE = 3,
  TE_STATUS_INVALID_ARGUMENT = 4,
  TE_STATUS_NOT_A_PATTERN = 5,
  TE_STATUS_RESOURCE_CAP = 6,
  TE_STATUS_BUDGET_EXHAUSTED = 7,
  TE_STATUS_NO_AVOIDER = 8,
  TE_STATUS_INTERNAL = 9,
  TE_STATUS_PANIC = 10,
} TeStatus;

/**
 * Opaque validated t-pattern.
 */
typedef struct TePattern TePattern;

/**
 * Opaque 0-1 tensor.
 */
typedef struct TeTensor TeTensor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *te_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void te_string_free(char *s);

/**
 * Parses a JSON tensor `{"t", "shape", "ones"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
TeStatus te_tensor_from_json(const char *json, TeTensor **out);

/**
 * Serializes a tensor to JSON; free the result with [`te_string_free`].
 *
 * # Safety
 * `tensor` must be a live handle; `out` must be writable.
 */
TeStatus te_tensor_to_json(const TeTensor *tensor, char **out);

/**
 * Number of ones in the tensor.
 *
 * # Safety
 * `tensor` must be a live handle; `out` must be writable.
 */
TeStatus te_tensor_ones(const TeTensor *tensor, size_t *out);

/**
 * # Safety
 * `tensor` must be NULL or a live handle, not used afterwards.
 */
void te_tensor_free(TeTensor *tensor);

/**
 * Parses and validates a JSON pattern; fails with
 * [`TeStatus::NotAPattern`] when two ones agree in all but one position.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
TeStatus te_pattern_from_json(const char *json, TePattern **out);

/**
 * # Safety
 * `pattern` must be NULL or a live handle, not used afterwards.
 */
void te_pattern_free(TePattern *pattern);

/**
 * Sets `*out` to whether `host` contains `pattern`. `budget` caps the
 * search nodes; 0 means the library default.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
TeStatus te_contains(const TeTensor *host, const TePattern *pattern, uint64_t budget, bool *out);

/**
 * Exact `f_t(n, P)` at the pattern's dimension. When `witness` is not
 * NULL it receives a new handle to an extremal tensor.
 *
 * # Safety
 * `pattern` must be live; `value` must be writable; `witness` may be NULL.
 */
TeStatus te_f_exact(size_t n,
                    const TePattern *pattern,
                    uint64_t budget,
                    size_t threads,
                    size_t *value,
                    TeTensor **witness);

/**
 * Number of `n x ... x n` tensors avoiding the pattern.
 *
 * # Safety
 * `pattern` must be live; `out` must be writable.
 */
TeStatus te_count_avoiders(size_t n, const TePattern *pattern, size_t threads, uint64_t *out);

/**
 * `alpha_t(k)` as an exact decimal or `num/den` string; free the result
 * with [`te_string_free`].
 *
 * # Safety
 * `out` must be writable.
 */
TeStatus te_alpha(size_t t, size_t k, char **out);

/**
 * Library version, a static string.
 */
const char *te_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TENSOR_EXTREMAL_H */
