#ifndef RUMORQ_H
#define RUMORQ_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum RqStatus {
  RQ_STATUS_OK = 0,
  RQ_STATUS_NULL_POINTER = 1,
  RQ_STATUS_INVALID_ARGUMENT = 2,
  RQ_STATUS_IO = 3,
  RQ_STATUS_SIMULATION_FAILED = 4,
  RQ_STATUS_ESTIMATION_FAILED = 5,
  RQ_STATUS_PANIC = 6,
} RqStatus;

/**
 * Estimator selector for [`rq_estimate`].
 */
typedef enum RqEstimator {
  RQ_ESTIMATOR_NO_QUERY = 0,
  RQ_ESTIMATOR_SBQ = 1,
  RQ_ESTIMATOR_SBQ_MLE = 2,
  RQ_ESTIMATOR_IDQ = 3,
  RQ_ESTIMATOR_IDQ_MLE = 4,
} RqEstimator;

/**
 * Opaque immutable graph handle.
 */
typedef struct RqGraph RqGraph;

/**
 * Opaque diffusion-snapshot handle.
 */
typedef struct RqSnapshot RqSnapshot;

/**
 * Result of one estimation run.
 */
typedef struct RqEstimate {
  /**
   * Estimated source node id.
   */
  uint32_t estimate;
  /**
   * Questions actually spent.
   */
  uint64_t budget_spent;
  /**
   * 1 when the estimate equals the snapshot's true source.
   */
  uint8_t hit;
} RqEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Human-readable name of a status code; never null, statically
 * allocated, not to be freed.
 */
const char *rq_status_name(enum RqStatus status);

/**
 * Builds the ball of `hops` hops around the root of a d-regular tree.
 *
 * # Safety
 * `out` must be a valid pointer to an `RqGraph*` slot.
 */
enum RqStatus rq_graph_regular_tree_ball(uint32_t degree, uint32_t hops, struct RqGraph **out);

/**
 * Largest component of an Erdos-Renyi graph with the given mean degree.
 *
 * # Safety
 * `out` must be a valid pointer to an `RqGraph*` slot.
 */
enum RqStatus rq_graph_er(size_t n, double avg_degree, uint64_t seed, struct RqGraph **out);

/**
 * Preferential-attachment scale-free graph with the given edge/node
 * ratio.
 *
 * # Safety
 * `out` must be a valid pointer to an `RqGraph*` slot.
 */
enum RqStatus rq_graph_scale_free(size_t n, double ratio, uint64_t seed, struct RqGraph **out);

/**
 * Loads a whitespace-separated edge list (`#` comments allowed) from a
 * NUL-terminated UTF-8 path.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be a valid
 * pointer to an `RqGraph*` slot.
 */
enum RqStatus rq_graph_load_edge_list(const char *path, struct RqGraph **out);

/**
 * Number of nodes; 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle from this library.
 */
size_t rq_graph_node_count(const struct RqGraph *graph);

/**
 * Number of undirected edges; 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle from this library.
 */
size_t rq_graph_edge_count(const struct RqGraph *graph);

/**
 * Frees a graph handle; null is a no-op.
 *
 * # Safety
 * `graph` must be null or a live handle not freed before.
 */
void rq_graph_free(struct RqGraph *graph);

/**
 * Simulates SI diffusion on an unbounded d-regular tree from its root
 * until `n_infected` nodes hold the rumor.
 *
 * # Safety
 * `out` must be a valid pointer to an `RqSnapshot*` slot.
 */
enum RqStatus rq_simulate_regular_tree(uint32_t degree,
                                       size_t n_infected,
                                       uint64_t seed,
                                       struct RqSnapshot **out);

/**
 * Simulates SI diffusion on a graph handle. A negative `source` picks a
 * uniformly random source from the seed.
 *
 * # Safety
 * `graph` must be a live handle; `out` must be a valid pointer to an
 * `RqSnapshot*` slot.
 */
enum RqStatus rq_simulate_on_graph(const struct RqGraph *graph,
                                   int64_t source,
                                   size_t n_infected,
                                   uint64_t seed,
                                   struct RqSnapshot **out);

/**
 * True source node id of a snapshot; `u32::MAX` for a null handle.
 *
 * # Safety
 * `snapshot` must be null or a live handle from this library.
 */
uint32_t rq_snapshot_source(const struct RqSnapshot *snapshot);

/**
 * Number of infected nodes; 0 for a null handle.
 *
 * # Safety
 * `snapshot` must be null or a live handle from this library.
 */
size_t rq_snapshot_infected_count(const struct RqSnapshot *snapshot);

/**
 * Frees a snapshot handle; null is a no-op.
 *
 * # Safety
 * `snapshot` must be null or a live handle not freed before.
 */
void rq_snapshot_free(struct RqSnapshot *snapshot);

/**
 * Runs one estimator on a snapshot. `r = 0` selects the closed-form
 * optimal repetition count; `p`/`q` are the identity/direction truth
 * probabilities and `d` the reference degree.
 *
 * # Safety
 * `snapshot` must be a live handle; `out` must be a valid pointer to an
 * `RqEstimate` slot.
 */
enum RqStatus rq_estimate(const struct RqSnapshot *snapshot,
                          enum RqEstimator estimator,
                          double p,
                          double q,
                          uint32_t d,
                          uint64_t k_budget,
                          uint32_t r,
                          uint64_t seed,
                          struct RqEstimate *out);

/**
 * Sufficient batch-querying budget for failure probability `delta`;
 * writes NaN-free output only on `Ok`.
 *
 * # Safety
 * `out` must be a valid pointer to a double slot.
 */
enum RqStatus rq_budget_bound_batch(double delta, double p, uint32_t d, double *out);

/**
 * Sufficient interactive-querying budget for failure probability
 * `delta`.
 *
 * # Safety
 * `out` must be a valid pointer to a double slot.
 */
enum RqStatus rq_budget_bound_interactive(double delta, double q, uint32_t d, double *out);

/**
 * Regularized incomplete beta function I_x(a, b).
 *
 * # Safety
 * `out` must be a valid pointer to a double slot.
 */
enum RqStatus rq_reg_inc_beta(double x, double a, double b, double *out);

/**
 * Probability that a p-truthful source survives the majority filter
 * after r repetitions.
 */
double rq_majority_success_prob(double p, uint32_t r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RUMORQ_H */
