#ifndef FVDOM_H
#define FVDOM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FvdomPreconditioner {
  FVDOM_PRECONDITIONER_NONE = 0,
  FVDOM_PRECONDITIONER_JACOBI = 1,
  FVDOM_PRECONDITIONER_BLOCK_JACOBI = 2,
  FVDOM_PRECONDITIONER_ILU0 = 3,
} FvdomPreconditioner;

// Result codes shared by every entry point.
typedef enum FvdomStatus {
  FVDOM_STATUS_OK = 0,
  FVDOM_STATUS_NULL_POINTER = 1,
  FVDOM_STATUS_INVALID_ARGUMENT = 2,
  FVDOM_STATUS_IO = 3,
  FVDOM_STATUS_MESH = 4,
  FVDOM_STATUS_PARTITION = 5,
  FVDOM_STATUS_SOLVER = 6,
  FVDOM_STATUS_BUFFER_TOO_SMALL = 7,
  FVDOM_STATUS_PANIC = 8,
} FvdomStatus;

// Opaque mesh handle.
typedef struct FvdomMesh FvdomMesh;

// FGMRES settings; obtain defaults from [`fvdom_poisson_default_options`].
typedef struct FvdomPoissonOptions {
  // Relative residual tolerance.
  double tol;
  // Krylov restart length.
  size_t restart;
  size_t max_iter;
  enum FvdomPreconditioner preconditioner;
  // Constant right-hand side `f` of `lap P = f`.
  double source;
} FvdomPoissonOptions;

typedef struct FvdomSolveReport {
  size_t iterations;
  // Final relative residual `|b - A x| / |b|`.
  double residual;
  // Nonzeros of the assembled matrix, summed over partitions.
  size_t nonzeros;
} FvdomSolveReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL after a
// successful call. The pointer stays valid until the next call.
const char *fvdom_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *fvdom_version(void);

// Loads a Gmsh 2.2 ASCII mesh.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum FvdomStatus fvdom_mesh_load(const char *path, struct FvdomMesh **out);

// Builds the unit cube split into `n^3` hexahedra of six tetrahedra each,
// with patches `in`/`out` (x=0/1), `front`/`back` (y) and
// `bottom`/`upper` (z). Interior nodes are moved
// by up to `jitter` (fraction of the spacing, below 0.5) using `seed`.
//
// # Safety
// `out` must be a valid pointer.
enum FvdomStatus fvdom_mesh_box(size_t n, double jitter, uint64_t seed, struct FvdomMesh **out);

// Releases a mesh. NULL is ignored.
//
// # Safety
// `mesh` must come from this library and not be used afterwards.
void fvdom_mesh_free(struct FvdomMesh *mesh);

// Writes the node, cell, face and boundary-patch counts; any output
// pointer may be NULL.
//
// # Safety
// Non-NULL pointers must be valid.
enum FvdomStatus fvdom_mesh_counts(const struct FvdomMesh *mesh,
                                   size_t *nodes,
                                   size_t *cells,
                                   size_t *faces,
                                   size_t *patches);

// Copies the name of patch `index` into `buf` (NUL-terminated). With
// `buf` NULL or too small, `*needed` receives the required size including
// the terminator and the call fails with `BUFFER_TOO_SMALL` (only when
// `buf` is non-NULL).
//
// # Safety
// `buf` must hold `len` bytes; `needed` may be NULL.
enum FvdomStatus fvdom_mesh_patch_name(const struct FvdomMesh *mesh,
                                       size_t index,
                                       char *buf,
                                       size_t len,
                                       size_t *needed);

// Partitions the mesh into `k` parts and writes per-part inner-cell, halo
// and neighbour counts into arrays of length `k` (any may be NULL).
//
// # Safety
// Non-NULL arrays must hold `k` elements.
enum FvdomStatus fvdom_partition_stats(const struct FvdomMesh *mesh,
                                       size_t k,
                                       size_t *inner,
                                       size_t *halo,
                                       size_t *neighbors);

struct FvdomPoissonOptions fvdom_poisson_default_options(void);

// Solves `lap P = source` on `k` workers. Patch `names[i]` gets the
// Dirichlet value `values[i]`; unlisted patches are zero-flux (Neumann).
// `solution` receives one value per cell in mesh order.
//
// # Safety
// `names` and `values` must hold `n_dirichlet` entries, `solution` must
// hold `solution_len` doubles, `options` and `report` may be NULL.
enum FvdomStatus fvdom_poisson_solve(const struct FvdomMesh *mesh,
                                     size_t k,
                                     const char *const *names,
                                     const double *values,
                                     size_t n_dirichlet,
                                     const struct FvdomPoissonOptions *options,
                                     double *solution,
                                     size_t solution_len,
                                     struct FvdomSolveReport *report);

// Townsend ionization coefficient over neutral density, alpha/N in cm^2,
// as a function of reduced field E/N in V cm^2.
//
// # Safety
// `out` must be a valid pointer.
enum FvdomStatus fvdom_ionization_ratio(double e_over_n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FVDOM_H */
