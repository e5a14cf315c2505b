#ifndef CCQ_H
#define CCQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum CcqStatus {
  CCQ_STATUS_OK = 0,
  CCQ_STATUS_NULL_POINTER = 1,
  CCQ_STATUS_INVALID_ARGUMENT = 2,
  CCQ_STATUS_IO = 3,
  CCQ_STATUS_PARSE = 4,
  CCQ_STATUS_BUDGET_EXHAUSTED = 5,
  CCQ_STATUS_ORACLE = 6,
  CCQ_STATUS_PANIC = 7,
} CcqStatus;

/**
 * Opaque clustering (one cluster ID per vertex).
 */
typedef struct CcqClustering CcqClustering;

/**
 * Opaque signed complete graph.
 */
typedef struct CcqGraph CcqGraph;

/**
 * Same-cluster callback: return 1 for together, 0 for apart, negative to
 * abort the run with [`CcqStatus::Oracle`].
 */
typedef int (*CcqOracleFn)(void *user, size_t u, size_t v);

/**
 * Result counters of a pivot run.
 */
typedef struct CcqRunStats {
  uint64_t queries;
  uint64_t mistakes;
} CcqRunStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Most recent error message on this thread, or NULL. The pointer stays valid
 * until the next `ccq_*` call on the same thread.
 */
const char *ccq_last_error_message(void);

/**
 * Builds a graph on `n` vertices whose `+` edges are `(us[i], vs[i])`.
 *
 * # Safety
 * `us` and `vs` must point to `m` readable values each; `out` must be
 * writable.
 */
enum CcqStatus ccq_graph_new(size_t n,
                             const size_t *us,
                             const size_t *vs,
                             size_t m,
                             struct CcqGraph **out);

/**
 * Reads a signed-graph file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum CcqStatus ccq_graph_read(const char *path, struct CcqGraph **out);

/**
 * Reads a weighted-graph file and rounds it at weight 1/2.
 *
 * # Safety
 * As [`ccq_graph_read`].
 */
enum CcqStatus ccq_graph_read_weighted(const char *path, struct CcqGraph **out);

/**
 * Writes `g` in the signed-graph file format.
 *
 * # Safety
 * `g` must be a live handle and `path` a NUL-terminated string.
 */
enum CcqStatus ccq_graph_write(const struct CcqGraph *g, const char *path);

/**
 * Number of vertices, or 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or a live handle.
 */
size_t ccq_graph_vertex_count(const struct CcqGraph *g);

/**
 * Number of `+` edges, or 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or a live handle.
 */
size_t ccq_graph_plus_edge_count(const struct CcqGraph *g);

/**
 * Releases a graph. NULL is ignored.
 *
 * # Safety
 * `g` must be NULL or a handle not yet freed.
 */
void ccq_graph_free(struct CcqGraph *g);

/**
 * Builds a clustering from one cluster ID per vertex.
 *
 * # Safety
 * `assignment` must point to `n` readable values; `out` must be writable.
 */
enum CcqStatus ccq_clustering_new(const size_t *assignment, size_t n, struct CcqClustering **out);

/**
 * Reads a clustering file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum CcqStatus ccq_clustering_read(const char *path, struct CcqClustering **out);

/**
 * Number of vertices covered, or 0 for NULL.
 *
 * # Safety
 * `c` must be NULL or a live handle.
 */
size_t ccq_clustering_len(const struct CcqClustering *c);

/**
 * Copies the canonical assignment (IDs numbered by first appearance) into
 * `buf`, which must hold `len` values with `len` equal to the clustering's
 * length.
 *
 * # Safety
 * `c` must be a live handle and `buf` writable for `len` values.
 */
enum CcqStatus ccq_clustering_assignment(const struct CcqClustering *c, size_t *buf, size_t len);

/**
 * Releases a clustering. NULL is ignored.
 *
 * # Safety
 * `c` must be NULL or a handle not yet freed.
 */
void ccq_clustering_free(struct CcqClustering *c);

/**
 * Disagreements of `c` on `g`.
 *
 * # Safety
 * `g` and `c` must be live handles; `out` must be writable.
 */
enum CcqStatus ccq_count_disagreements(const struct CcqGraph *g,
                                       const struct CcqClustering *c,
                                       uint64_t *out);

/**
 * Optimal clustering of `g` within `node_budget` search nodes (0 selects the
 * default budget). Writes the clustering and its cost.
 *
 * # Safety
 * `g` must be a live handle; `out` and `cost` must be writable.
 */
enum CcqStatus ccq_solve_exact(const struct CcqGraph *g,
                               uint64_t node_budget,
                               struct CcqClustering **out,
                               uint64_t *cost);

/**
 * QueryPivot with a caller-supplied same-cluster callback. `stats` may be
 * NULL.
 *
 * # Safety
 * `g` must be a live handle, `callback` safe to call with `user`, and `out`
 * writable.
 */
enum CcqStatus ccq_query_pivot(const struct CcqGraph *g,
                               CcqOracleFn callback,
                               void *user,
                               struct CcqClustering **out,
                               struct CcqRunStats *stats);

/**
 * QueryPivot answering queries from `backing`. `stats` may be NULL.
 *
 * # Safety
 * `g` and `backing` must be live handles and `out` writable.
 */
enum CcqStatus ccq_query_pivot_clustering(const struct CcqGraph *g,
                                          const struct CcqClustering *backing,
                                          struct CcqClustering **out,
                                          struct CcqRunStats *stats);

/**
 * RandomQueryPivot(p) answering queries from `backing`. `stats` may be NULL.
 *
 * # Safety
 * As [`ccq_query_pivot_clustering`].
 */
enum CcqStatus ccq_random_query_pivot(const struct CcqGraph *g,
                                      const struct CcqClustering *backing,
                                      double p,
                                      uint64_t seed,
                                      struct CcqClustering **out,
                                      struct CcqRunStats *stats);

/**
 * Query-free randomized pivot baseline. `stats` may be NULL.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum CcqStatus ccq_acn_pivot(const struct CcqGraph *g,
                             uint64_t seed,
                             struct CcqClustering **out,
                             struct CcqRunStats *stats);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CCQ_H */
