#ifndef DENSEPRE_H
#define DENSEPRE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DpStatus {
  DP_STATUS_OK = 0,
  DP_STATUS_NULL_POINTER = 1,
  DP_STATUS_INVALID_ARGUMENT = 2,
  DP_STATUS_DIMENSION_MISMATCH = 3,
  DP_STATUS_PARSE = 4,
  DP_STATUS_IO = 5,
  DP_STATUS_SINGULAR = 6,
  DP_STATUS_RANK_DEFICIENT = 7,
  DP_STATUS_NUMERICAL_INSTABILITY = 8,
  DP_STATUS_REQUIRES_ONE_SIDED = 9,
  DP_STATUS_PANIC = 10,
} DpStatus;

typedef enum DpMode {
  DP_MODE_TWO_SIDED = 0,
  DP_MODE_ONE_SIDED_ROW = 1,
  DP_MODE_ONE_SIDED_COL = 2,
  DP_MODE_STANDARD = 3,
} DpMode;

/**
 * Sparse matrix in compressed row storage.
 */
typedef struct DpMatrix DpMatrix;

/**
 * Solution vectors and the relative residual on the original system.
 */
typedef struct DpSolution DpSolution;

/**
 * Saddle-point system with blocks A, B1, B2, C and right-hand sides f, g.
 */
typedef struct DpSystem DpSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the next call.
 */
const char *dp_last_error_message(void);

/**
 * Static description of a status code.
 */
const char *dp_status_string(enum DpStatus status);

const char *dp_version(void);

/**
 * Builds a matrix from 0-based triplets; duplicates are summed.
 *
 * # Safety
 * `rows`, `cols` and `vals` must each point to `nnz` readable elements.
 */
enum DpStatus dp_matrix_from_triplets(size_t nrows,
                                      size_t ncols,
                                      size_t nnz,
                                      const size_t *rows,
                                      const size_t *cols,
                                      const double *vals,
                                      struct DpMatrix **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string.
 */
enum DpStatus dp_matrix_read_mtx(const char *path, struct DpMatrix **out);

/**
 * # Safety
 * `m` must be a live handle and `path` a NUL-terminated string.
 */
enum DpStatus dp_matrix_write_mtx(const struct DpMatrix *m, const char *path);

/**
 * `out = a * b`.
 *
 * # Safety
 * `a` and `b` must be live handles.
 */
enum DpStatus dp_matrix_spgemm(const struct DpMatrix *a,
                               const struct DpMatrix *b,
                               struct DpMatrix **out);

/**
 * # Safety
 * `m` must be a live handle or NULL.
 */
size_t dp_matrix_nrows(const struct DpMatrix *m);

/**
 * # Safety
 * `m` must be a live handle or NULL.
 */
size_t dp_matrix_ncols(const struct DpMatrix *m);

/**
 * # Safety
 * `m` must be a live handle or NULL.
 */
size_t dp_matrix_nnz(const struct DpMatrix *m);

/**
 * Borrowed views of the CSR arrays, valid while the handle lives.
 * `row_ptr` has `nrows + 1` entries, the other two `nnz`.
 *
 * # Safety
 * `m` must be a live handle; the output pointers must be writable.
 */
enum DpStatus dp_matrix_csr(const struct DpMatrix *m,
                            const size_t **row_ptr,
                            const size_t **col_idx,
                            const double **values);

/**
 * # Safety
 * `m` must be a handle from this library or NULL; it is invalid afterwards.
 */
void dp_matrix_free(struct DpMatrix *m);

/**
 * Copies the blocks into a new system. `c` may be NULL for an empty `m x m` block.
 *
 * # Safety
 * Matrix arguments must be live handles (or NULL where allowed);
 * `f` must hold `n` values and `g` `m` values.
 */
enum DpStatus dp_system_new(const struct DpMatrix *a,
                            const struct DpMatrix *b1,
                            const struct DpMatrix *b2,
                            const struct DpMatrix *c,
                            const double *f,
                            size_t n,
                            const double *g,
                            size_t m,
                            struct DpSystem **out);

/**
 * Bordered identity of order `n` with `b2_nnz` random entries in B2
 * (`b2_nnz = n` for a full row), a full B1 and `C = [c]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum DpStatus dp_system_arrowhead(size_t n,
                                  size_t b2_nnz,
                                  double c,
                                  uint64_t seed,
                                  struct DpSystem **out);

/**
 * P1 Poisson problem with Neumann boundary on a `k x k` vertex grid.
 *
 * # Safety
 * `out` must be writable.
 */
enum DpStatus dp_system_poisson(size_t k, struct DpSystem **out);

/**
 * Reads a directory written by `densepre generate`.
 *
 * # Safety
 * `dir` must be a NUL-terminated string.
 */
enum DpStatus dp_system_read_dir(const char *dir, struct DpSystem **out);

/**
 * # Safety
 * `s` must be a live handle or NULL.
 */
size_t dp_system_n(const struct DpSystem *s);

/**
 * # Safety
 * `s` must be a live handle or NULL.
 */
size_t dp_system_m(const struct DpSystem *s);

/**
 * The full `(n+m) x (n+m)` matrix as a new handle.
 *
 * # Safety
 * `s` must be a live handle.
 */
enum DpStatus dp_system_assemble(const struct DpSystem *s, struct DpMatrix **out);

/**
 * # Safety
 * `s` must be a handle from this library or NULL; it is invalid afterwards.
 */
void dp_system_free(struct DpSystem *s);

/**
 * Solves the system. `eps` is the drop tolerance used when building null
 * bases; `pivot_tol` in `[0, 1]` controls threshold pivoting.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum DpStatus dp_solve(const struct DpSystem *s,
                       enum DpMode mode,
                       double eps,
                       double pivot_tol,
                       struct DpSolution **out);

/**
 * # Safety
 * `sol` must be a live handle or NULL.
 */
size_t dp_solution_n(const struct DpSolution *sol);

/**
 * # Safety
 * `sol` must be a live handle or NULL.
 */
size_t dp_solution_m(const struct DpSolution *sol);

/**
 * Borrowed pointer to `x`, valid while the handle lives.
 *
 * # Safety
 * `sol` must be a live handle or NULL.
 */
const double *dp_solution_x(const struct DpSolution *sol);

/**
 * Borrowed pointer to `y`, valid while the handle lives.
 *
 * # Safety
 * `sol` must be a live handle or NULL.
 */
const double *dp_solution_y(const struct DpSolution *sol);

/**
 * Relative infinity-norm residual on the original system, NaN for NULL.
 *
 * # Safety
 * `sol` must be a live handle or NULL.
 */
double dp_solution_residual(const struct DpSolution *sol);

/**
 * # Safety
 * `sol` must be a handle from this library or NULL; it is invalid afterwards.
 */
void dp_solution_free(struct DpSolution *sol);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DENSEPRE_H */
