#ifndef GCSG_H
#define GCSG_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GcsgAlgorithm {
  GCSG_ALGORITHM_AUTO = 0,
  GCSG_ALGORITHM_BRUTEFORCE = 1,
  GCSG_ALGORITHM_TREE = 2,
  GCSG_ALGORITHM_MINOR_FREE = 3,
  GCSG_ALGORITHM_SEPARATOR = 4,
} GcsgAlgorithm;

typedef enum GcsgClass {
  GCSG_CLASS_ACYCLIC = 0,
  GCSG_CLASS_K4_MINOR_FREE = 1,
  GCSG_CLASS_K23_MINOR_FREE = 2,
  GCSG_CLASS_GENERAL = 3,
} GcsgClass;

typedef enum GcsgStatus {
  GCSG_STATUS_OK = 0,
  GCSG_STATUS_NULL_POINTER = 1,
  GCSG_STATUS_INVALID_ARGUMENT = 2,
  GCSG_STATUS_INVALID_GRAPH = 3,
  GCSG_STATUS_CLASS_MISMATCH = 4,
  GCSG_STATUS_BUDGET_EXCEEDED = 5,
  GCSG_STATUS_CAP_EXCEEDED = 6,
  GCSG_STATUS_INFEASIBLE = 7,
  GCSG_STATUS_PANIC = 8,
} GcsgStatus;

/**
 * Edge-weighted graph.
 */
typedef struct GcsgGraph GcsgGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *gcsg_last_error(void);

/**
 * Builds a graph on nodes `0..n` with edges `(us[k], vs[k])` of weight
 * `weights[k]`.
 *
 * # Safety
 * `us`, `vs` and `weights` must hold `edge_count` elements; `out` must be
 * writable.
 */
enum GcsgStatus gcsg_graph_new(size_t n,
                               const size_t *us,
                               const size_t *vs,
                               const int64_t *weights,
                               size_t edge_count,
                               struct GcsgGraph **out);

/**
 * # Safety
 * `graph` must come from [`gcsg_graph_new`] and not be freed twice.
 */
void gcsg_graph_free(struct GcsgGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null.
 */
size_t gcsg_graph_node_count(const struct GcsgGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null.
 */
size_t gcsg_graph_edge_count(const struct GcsgGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle; `out` must be writable.
 */
enum GcsgStatus gcsg_classify(const struct GcsgGraph *graph, enum GcsgClass *out);

/**
 * Number of connected structures, for graphs of at most `cap` nodes.
 *
 * # Safety
 * `graph` must be a live handle; `out` must be writable.
 */
enum GcsgStatus gcsg_count_structures(const struct GcsgGraph *graph, size_t cap, uint64_t *out);

/**
 * Optimal connected structure. Writes the block index of every node to
 * `labels` (length `n`, blocks numbered by smallest member) and the total
 * value to `value`.
 *
 * `constraint` is null or holds `n` entries: `-1` for a free node,
 * otherwise a group id; nodes with equal ids must share a block and
 * nodes with different ids must not. Returns `Infeasible` when no
 * connected structure meets it.
 *
 * # Safety
 * `graph` must be a live handle; `labels` must hold `n` writable entries;
 * `constraint`, when non-null, must hold `n` entries; `value` must be
 * writable.
 */
enum GcsgStatus gcsg_solve(const struct GcsgGraph *graph,
                           enum GcsgAlgorithm algorithm,
                           const int64_t *constraint,
                           size_t *labels,
                           int64_t *value);

/**
 * Crate version as a static NUL-terminated string.
 */
const char *gcsg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GCSG_H */
