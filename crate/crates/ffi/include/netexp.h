#ifndef NETEXP_H
#define NETEXP_H

/* Generated by cbindgen from the netexp-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  NX_STATUS_OK = 0,
  NX_STATUS_NULL_POINTER = 1,
  NX_STATUS_INVALID_ARGUMENT = 2,
  NX_STATUS_INVALID_SPEC = 3,
  NX_STATUS_PARSE_ERROR = 4,
  NX_STATUS_IO_ERROR = 5,
  NX_STATUS_ENUMERATION_TOO_LARGE = 6,
  NX_STATUS_ZERO_EXPOSURE_PROBABILITY = 7,
  NX_STATUS_INTERNAL = 8,
} NxStatus;

/**
 * Link function selector for the outcome process.
 */
typedef enum {
  NX_LINK_PROBIT = 0,
  NX_LINK_IDENTITY = 1,
  NX_LINK_IDENTITY_NOISELESS = 2,
} NxLink;

/**
 * Effective-treatment condition selector; `lambda` is read only for the
 * fractional kinds.
 */
typedef enum {
  NX_EXPOSURE_ITR = 0,
  NX_EXPOSURE_FNTR = 1,
  NX_EXPOSURE_NTR = 2,
  NX_EXPOSURE_CLUSTER_FNTR = 3,
} NxExposure;

/**
 * Opaque drawn treatment assignment.
 */
typedef struct NxAssignment NxAssignment;

/**
 * Opaque vertex partition.
 */
typedef struct NxClustering NxClustering;

/**
 * Opaque undirected simple graph.
 */
typedef struct NxGraph NxGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *nx_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *nx_version(void);

/**
 * Generates a small-world graph (ring lattice of degree `k`, each lattice
 * edge rewired with probability `p_rewire`) from a deterministic seed.
 */
NxStatus nx_graph_small_world(uintptr_t n,
                              uintptr_t k,
                              double p_rewire,
                              uint64_t seed,
                              NxGraph **out);

/**
 * Generates a degree-corrected blockmodel graph from a deterministic seed.
 */
NxStatus nx_graph_dcbm(uintptr_t n,
                       uintptr_t communities,
                       double p_within,
                       double degree_mean,
                       double degree_variance,
                       uint64_t seed,
                       NxGraph **out);

/**
 * Reads an edge-list file (`u v` per line, 0-based ids).
 */
NxStatus nx_graph_read_edge_list(const char *path, NxGraph **out);

/**
 * Frees a graph handle; a null pointer is ignored.
 */
void nx_graph_free(NxGraph *graph);

uintptr_t nx_graph_vertex_count(const NxGraph *graph);

uintptr_t nx_graph_edge_count(const NxGraph *graph);

/**
 * Average local clustering coefficient; NaN for a null handle.
 */
double nx_graph_clustering_coefficient(const NxGraph *graph);

/**
 * Builds an epsilon-net clustering with randomized center selection.
 */
NxStatus nx_clustering_epsilon_net(const NxGraph *graph,
                                   uintptr_t epsilon,
                                   uint64_t seed,
                                   NxClustering **out);

/**
 * Builds the clustering with every vertex in its own cluster.
 */
NxStatus nx_clustering_singleton(uintptr_t n, NxClustering **out);

void nx_clustering_free(NxClustering *clustering);

/**
 * Number of clusters in the partition.
 */
uintptr_t nx_clustering_count(const NxClustering *clustering);

/**
 * Cluster id of a vertex, or `SIZE_MAX` when out of range.
 */
uintptr_t nx_clustering_of(const NxClustering *clustering, uintptr_t vertex);

/**
 * Draws iid Bernoulli(q) assignments for `n` vertices.
 */
NxStatus nx_assignment_independent(uintptr_t n, double q, uint64_t seed, NxAssignment **out);

/**
 * Draws cluster-level Bernoulli(q) assignments over a clustering.
 */
NxStatus nx_assignment_graph_cluster(const NxClustering *clustering,
                                     double q,
                                     uint64_t seed,
                                     NxAssignment **out);

/**
 * Treats exactly half of the clusters, chosen uniformly at random.
 */
NxStatus nx_assignment_balanced_graph_cluster(const NxClustering *clustering,
                                              uint64_t seed,
                                              NxAssignment **out);

/**
 * Cluster assignment with per-vertex hole punching: each vertex keeps its
 * cluster's draw with probability `eta` and flips it otherwise.
 */
NxStatus nx_assignment_hole_punched(const NxClustering *clustering,
                                    double q,
                                    double eta,
                                    uint64_t seed,
                                    NxAssignment **out);

void nx_assignment_free(NxAssignment *assignment);

uintptr_t nx_assignment_len(const NxAssignment *assignment);

/**
 * Copies the binary treatment vector into a caller buffer of length `len`
 * (which must equal the assignment length).
 */
NxStatus nx_assignment_copy_z(const NxAssignment *assignment, uint8_t *buffer, uintptr_t len);

/**
 * Runs the peer-effect outcome process and writes the final behaviors
 * into `y_out` (length = vertex count).
 */
NxStatus nx_simulate_final(const NxGraph *graph,
                           const NxAssignment *assignment,
                           double alpha,
                           double beta,
                           double gamma,
                           uintptr_t steps,
                           NxLink link,
                           uint64_t noise_seed,
                           double *y_out);

/**
 * Monte Carlo ground-truth average treatment effect: paired global
 * treatment / global control runs on common noise.
 */
NxStatus nx_true_ate(const NxGraph *graph,
                     double alpha,
                     double beta,
                     double gamma,
                     uintptr_t steps,
                     NxLink link,
                     uintptr_t replications,
                     uint64_t seed,
                     double *ate_out,
                     double *se_out);

/**
 * Exposure probabilities under iid Bernoulli(q) vertex assignment, for
 * vertex-level conditions. Buffers must hold one value per vertex.
 */
NxStatus nx_exposure_prob_independent(const NxGraph *graph,
                                      NxExposure exposure,
                                      double lambda,
                                      double q,
                                      double *pi1_out,
                                      double *pi0_out);

/**
 * Exact exposure probabilities under graph cluster randomization with iid
 * Bernoulli(q) cluster assignment (convolution dynamic program).
 */
NxStatus nx_exposure_prob_cluster(const NxGraph *graph,
                                  const NxClustering *clustering,
                                  NxExposure exposure,
                                  double lambda,
                                  double q,
                                  double *pi1_out,
                                  double *pi0_out);

/**
 * Difference in sample means between treated and control vertices.
 * `defined_out` is 0 (and the estimate NaN) when a group is empty.
 */
NxStatus nx_diff_in_means(const double *y,
                          const uint8_t *z,
                          uintptr_t n,
                          double *estimate_out,
                          int *defined_out);

/**
 * Hajek (ratio-normalized inverse-probability-weighted) estimator under
 * the exposure condition. Pass a null clustering for independent
 * assignment; otherwise exposure probabilities are computed under graph
 * cluster randomization on the given clustering with probability `q`.
 */
NxStatus nx_hajek(const NxGraph *graph,
                  const NxClustering *clustering,
                  NxExposure exposure,
                  double lambda,
                  double q,
                  const double *y,
                  const NxAssignment *assignment,
                  double *estimate_out,
                  int *defined_out);

/**
 * Horvitz--Thompson estimator under the exposure condition; see
 * [`nx_hajek`] for the clustering convention.
 */
NxStatus nx_horvitz_thompson(const NxGraph *graph,
                             const NxClustering *clustering,
                             NxExposure exposure,
                             double lambda,
                             double q,
                             const double *y,
                             const NxAssignment *assignment,
                             double *estimate_out,
                             int *defined_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETEXP_H */
