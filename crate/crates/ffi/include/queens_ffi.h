#ifndef QUEENS_FFI_H
#define QUEENS_FFI_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QueensStatus {
  QUEENS_STATUS_OK = 0,
  /**
   * Null pointer or malformed argument.
   */
  QUEENS_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Board size, pre-placement, stack depth or partition rejected.
   */
  QUEENS_STATUS_CONFIG = 2,
  QUEENS_STATUS_OVERFLOW = 3,
  QUEENS_STATUS_CHECKPOINT = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  QUEENS_STATUS_INTERNAL = 5,
} QueensStatus;

typedef enum QueensKernel {
  QUEENS_KERNEL_ITERATIVE = 0,
  QUEENS_KERNEL_LAST_ROW = 1,
} QueensKernel;

typedef enum QueensStrategy {
  QUEENS_STRATEGY_UNIFORM = 0,
  QUEENS_STRATEGY_WEIGHTED = 1,
  QUEENS_STRATEGY_STEALING = 2,
} QueensStrategy;

/**
 * A finished (or interrupted) run. Opaque to C.
 */
typedef struct QueensReport QueensReport;

/**
 * Solver settings. Opaque to C.
 */
typedef struct QueensSolver QueensSolver;

/**
 * Result of a bank-conflict query.
 */
typedef struct QueensConflict {
  uint32_t transactions;
  uint32_t max_degree;
} QueensConflict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *queens_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *queens_version(void);

/**
 * Create a solver for an `n` x `n` board split after `pre_rows` rows, with
 * the default stack config, last-row kernel and one worker.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum QueensStatus queens_solver_new(uint32_t n, uint32_t pre_rows, struct QueensSolver **out);

/**
 * # Safety
 * `solver` must come from [`queens_solver_new`] and not be used afterwards.
 */
void queens_solver_free(struct QueensSolver *solver);

/**
 * Select a stack config by name (`config1`..`config5` or `words:<n>`).
 *
 * # Safety
 * `solver` must be a live handle and `name` a NUL-terminated string.
 */
enum QueensStatus queens_solver_set_config(struct QueensSolver *solver, const char *name);

/**
 * # Safety
 * `solver` must be a live handle.
 */
enum QueensStatus queens_solver_set_kernel(struct QueensSolver *solver, enum QueensKernel kernel);

/**
 * Partition work over `workers` threads. Weighted uses the reference
 * weights; see [`queens_solver_set_weights`] for custom ones.
 *
 * # Safety
 * `solver` must be a live handle.
 */
enum QueensStatus queens_solver_set_partition(struct QueensSolver *solver,
                                              enum QueensStrategy strategy,
                                              size_t workers);

/**
 * Weighted partition with one weight per worker.
 *
 * # Safety
 * `solver` must be a live handle and `weights` point to `len` doubles.
 */
enum QueensStatus queens_solver_set_weights(struct QueensSolver *solver,
                                            const double *weights,
                                            size_t len);

/**
 * Write progress to `path` every `interval` subproblems; NULL disables.
 *
 * # Safety
 * `solver` must be a live handle; `path` NULL or a NUL-terminated string.
 */
enum QueensStatus queens_solver_set_checkpoint(struct QueensSolver *solver,
                                               const char *path,
                                               uint64_t interval);

/**
 * Run the solver to completion.
 *
 * # Safety
 * `solver` must be a live handle and `out` valid for a report handle.
 */
enum QueensStatus queens_solver_run(const struct QueensSolver *solver, struct QueensReport **out);

/**
 * # Safety
 * `report` must come from [`queens_solver_run`] and not be used afterwards.
 */
void queens_report_free(struct QueensReport *report);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum QueensStatus queens_report_total(const struct QueensReport *report, uint64_t *out);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum QueensStatus queens_report_subproblems(const struct QueensReport *report, uint64_t *out);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum QueensStatus queens_report_calc_ms(const struct QueensReport *report, double *out);

/**
 * The report as JSON. Release the string with [`queens_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum QueensStatus queens_report_json(const struct QueensReport *report, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void queens_string_free(char *s);

/**
 * Number of subproblems after pre-placing `pre_rows` rows (symmetry folded).
 *
 * # Safety
 * `out` must be writable.
 */
enum QueensStatus queens_count_subproblems(uint32_t n, uint32_t pre_rows, uint64_t *out);

/**
 * Count the completions of one partial placement, multiplier not applied.
 *
 * # Safety
 * `out` must be writable.
 */
enum QueensStatus queens_count_completions(uint32_t n,
                                           uint32_t cur,
                                           uint32_t left,
                                           uint32_t right,
                                           uint32_t placed_rows,
                                           enum QueensKernel kernel,
                                           uint64_t *out);

/**
 * Bank conflict of one warp request of `len` byte addresses, each reading
 * `width` (4 or 16) bytes. `full_warp` evaluates wide accesses without
 * splitting them into hardware phases.
 *
 * # Safety
 * `addresses` must point to `len` values and `out` be writable.
 */
enum QueensStatus queens_conflict_degree(uint32_t bank_count,
                                         uint32_t word_bytes,
                                         uint32_t warp_size,
                                         const uint64_t *addresses,
                                         size_t len,
                                         uint32_t width,
                                         bool full_warp,
                                         struct QueensConflict *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUEENS_FFI_H */
