#ifndef COUPLED_ALPHA_H
#define COUPLED_ALPHA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CacStatus {
  CAC_STATUS_OK = 0,
  CAC_STATUS_NULL_POINTER = 1,
  CAC_STATUS_INVALID_ARGUMENT = 2,
  CAC_STATUS_NOT_IN_GENERAL_POSITION = 3,
  CAC_STATUS_NUMERICAL = 4,
  CAC_STATUS_INTERNAL = 5,
} CacStatus;

// A coupled alpha filtration and its persistence diagram.
typedef struct CacFiltration CacFiltration;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static, NUL-terminated description of `status`.
const char *cac_status_message(enum CacStatus status);

// Builds the coupled alpha filtration of `X` (`n_x` points) and `Y` (`n_y`
// points) in `R^dim` and stores a new handle in `*out`. Vertex `i < n_x` is
// `X[i]`; vertex `n_x + j` is `Y[j]`.
//
// # Safety
// `x` and `y` must point to `n_x * dim` and `n_y * dim` readable doubles
// (either may be null when its count is 0). `out` must be writable.
enum CacStatus cac_filtration_new(const double *x,
                                  size_t n_x,
                                  const double *y,
                                  size_t n_y,
                                  size_t dim,
                                  double epsilon,
                                  struct CacFiltration **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `f` must be null or a handle from [`cac_filtration_new`] not yet freed.
void cac_filtration_free(struct CacFiltration *f);

// Number of simplexes; 0 for null.
//
// # Safety
// `f` must be null or a live handle.
size_t cac_filtration_len(const struct CacFiltration *f);

// The `index`-th simplex in `(value, dim, lex)` order. Writes its value, its
// vertex count to `*len`, and up to `capacity` vertex indices to `vertices`.
// A `capacity` below the vertex count gives `InvalidArgument` with `*len` set.
//
// # Safety
// `f` must be a live handle; `value` and `len` writable; `vertices` writable
// for `capacity` entries (may be null when `capacity == 0`).
enum CacStatus cac_filtration_simplex(const struct CacFiltration *f,
                                      size_t index,
                                      size_t *vertices,
                                      size_t capacity,
                                      size_t *len,
                                      double *value);

// Number of persistence intervals of positive length; 0 for null.
//
// # Safety
// `f` must be null or a live handle.
size_t cac_filtration_interval_count(const struct CacFiltration *f);

// The `index`-th interval `[birth, death)` of homology dimension `*dim`.
// Essential classes have `death == INFINITY`.
//
// # Safety
// `f` must be a live handle; `dim`, `birth` and `death` writable.
enum CacStatus cac_filtration_interval(const struct CacFiltration *f,
                                       size_t index,
                                       size_t *dim,
                                       double *birth,
                                       double *death);

// Exhaustive coupled general position check. Returns `Ok` or
// `NotInGeneralPosition` and writes the number of violations to
// `*violations` when it is non-null.
//
// # Safety
// As for [`cac_filtration_new`]; `violations` may be null.
enum CacStatus cac_check_general_position(const double *x,
                                          size_t n_x,
                                          const double *y,
                                          size_t n_y,
                                          size_t dim,
                                          double epsilon,
                                          size_t *violations);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COUPLED_ALPHA_H */
