#ifndef DENSOPS_H
#define DENSOPS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a call. Values other than `Ok` mirror the error codes of the
// command-line driver.
typedef enum DensopsStatus {
  DENSOPS_STATUS_OK = 0,
  DENSOPS_STATUS_E_DIM = 1,
  DENSOPS_STATUS_E_SINGULAR_WEIGHT = 2,
  DENSOPS_STATUS_E_EXCLUDED_PARAM = 3,
  DENSOPS_STATUS_E_ORDER = 4,
  DENSOPS_STATUS_E_PARSE = 5,
  DENSOPS_STATUS_E_TABLE = 6,
  DENSOPS_STATUS_E_DOMAIN = 7,
  DENSOPS_STATUS_E_IO = 8,
  DENSOPS_STATUS_E_NULL_POINTER = 9,
  DENSOPS_STATUS_E_INTERNAL = 10,
} DensopsStatus;

// Opaque operator handle.
typedef struct DensopsOperator DensopsOperator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *densops_last_error_message(void);

// Stable name of a status, such as `"E_PARSE"`.
const char *densops_status_name(enum DensopsStatus status);

// Parses an operator expression over `x1..xd`, `d1..dd`, `w`.
//
// # Safety
// `src` must be a NUL-terminated string and `out` writable.
enum DensopsStatus densops_operator_parse(const char *src,
                                          size_t dim,
                                          struct DensopsOperator **out);

// Reads an operator from its JSON document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum DensopsStatus densops_operator_from_json(const char *json, struct DensopsOperator **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `op` must come from this library and not be used afterwards.
void densops_operator_free(struct DensopsOperator *op);

// Dimension of the underlying space, 0 for a null handle.
//
// # Safety
// `op` must be null or a live handle.
size_t densops_operator_dim(const struct DensopsOperator *op);

// Canonical JSON document of `op`.
//
// # Safety
// `op` must be a live handle and `out` writable.
enum DensopsStatus densops_operator_to_json(const struct DensopsOperator *op, char **out);

// Expression text of `op`, readable by [`densops_operator_parse`].
//
// # Safety
// `op` must be a live handle and `out` writable.
enum DensopsStatus densops_operator_to_string(const struct DensopsOperator *op, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void densops_string_free(char *s);

// `a o b`.
//
// # Safety
// `a`, `b` must be live handles and `out` writable.
enum DensopsStatus densops_operator_compose(const struct DensopsOperator *a,
                                            const struct DensopsOperator *b,
                                            struct DensopsOperator **out);

// Canonical adjoint.
//
// # Safety
// `a` must be a live handle and `out` writable.
enum DensopsStatus densops_operator_adjoint(const struct DensopsOperator *a,
                                            struct DensopsOperator **out);

// Substitutes the rational `lambda` for `w`.
//
// # Safety
// `a` must be a live handle, `lambda` a NUL-terminated string and `out`
// writable.
enum DensopsStatus densops_operator_restrict(const struct DensopsOperator *a,
                                             const char *lambda,
                                             struct DensopsOperator **out);

// Canonical self-adjoint lifting of a second-order operator.
//
// # Safety
// As for [`densops_operator_restrict`].
enum DensopsStatus densops_lift_canonical2(const struct DensopsOperator *a,
                                           const char *lambda,
                                           struct DensopsOperator **out);

// First-order pencil lifting at the point `[p:q]`.
//
// # Safety
// As for [`densops_operator_restrict`], with `p` and `q` NUL-terminated.
enum DensopsStatus densops_lift_first_order(const struct DensopsOperator *a,
                                            const char *lambda,
                                            const char *p,
                                            const char *q,
                                            struct DensopsOperator **out);

// Projectively equivariant pencil lifting.
//
// # Safety
// As for [`densops_operator_restrict`].
enum DensopsStatus densops_lift_dlo(const struct DensopsOperator *a,
                                    const char *lambda,
                                    struct DensopsOperator **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DENSOPS_H */
