#ifndef RSE_H
#define RSE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum RseStatus {
  RSE_STATUS_OK = 0,
  RSE_STATUS_NULL_POINTER = 1,
  RSE_STATUS_INVALID_UTF8 = 2,
  RSE_STATUS_PARSE = 3,
  RSE_STATUS_INVALID_SYSTEM = 4,
  RSE_STATUS_PRECONDITION = 5,
  RSE_STATUS_TOO_LARGE = 6,
  RSE_STATUS_INVALID_ARGUMENT = 7,
  RSE_STATUS_DEFECT = 8,
  RSE_STATUS_PANIC = 9,
} RseStatus;

/**
 * Opaque handle to a validated system.
 */
typedef struct RseSystem RseSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *rse_last_error_message(void);

/**
 * Parses and validates a system JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum RseStatus rse_system_from_json(const char *json, struct RseSystem **out);

/**
 * # Safety
 * `sys` must be NULL or a handle from this library not yet freed.
 */
void rse_system_free(struct RseSystem *sys);

/**
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum RseStatus rse_system_dimension(const struct RseSystem *sys, size_t *out);

/**
 * The canonical system JSON. Free the result with `rse_string_free`.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum RseStatus rse_system_to_json(const struct RseSystem *sys, char **out);

/**
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum RseStatus rse_system_is_ergodic(const struct RseSystem *sys, bool *out);

/**
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum RseStatus rse_system_is_weak_mixing(const struct RseSystem *sys, bool *out);

/**
 * Full mixing report as JSON. Free the result with `rse_string_free`.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum RseStatus rse_system_analyze_json(const struct RseSystem *sys, char **out);

/**
 * Tensor product `a ⊗ b`, refused when its dimension exceeds `max_dim`.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
enum RseStatus rse_system_tensor(const struct RseSystem *a,
                                 const struct RseSystem *b,
                                 size_t max_dim,
                                 struct RseSystem **out);

/**
 * A random valid system of dimension `dim`. `profile` is one of
 * `"block-permutation"`, `"global"`, `"identity"`.
 *
 * # Safety
 * `profile` must be a NUL-terminated string; `out` must be writable.
 */
enum RseStatus rse_generate(uint64_t seed, size_t dim, const char *profile, struct RseSystem **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library not yet freed.
 */
void rse_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RSE_H */
