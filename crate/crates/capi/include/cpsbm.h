#ifndef CPSBM_H
#define CPSBM_H

/* Generated from the cpsbm-capi crate by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CPSBM_OK 0

/**
 * A required pointer argument was null.
 */
#define CPSBM_ERR_NULL 1

/**
 * A string argument was not valid UTF-8.
 */
#define CPSBM_ERR_UTF8 2

#define CPSBM_ERR_IO 3

#define CPSBM_ERR_PARSE 4

#define CPSBM_ERR_INVALID 5

#define CPSBM_ERR_NUMERICAL 6

/**
 * An internal panic was caught at the boundary.
 */
#define CPSBM_ERR_PANIC 7

/**
 * Opaque fitted-model handle: best-of-restarts partition, coreness, and
 * description length.
 */
typedef struct CpsbmFit CpsbmFit;

/**
 * Opaque preprocessed graph handle.
 */
typedef struct CpsbmGraph CpsbmGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on the calling thread. The pointer
 * stays valid until the next failing call on the same thread. Never null;
 * empty string when nothing has failed yet.
 */
const char *cpsbm_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cpsbm_version(void);

/**
 * Loads and canonicalizes an edge-list file (drops self-loops and
 * duplicates, keeps the largest connected component).
 *
 * # Safety
 * `path` must point to a NUL-terminated string and `out` must be valid for
 * a pointer write. On success `*out` owns the graph; release it with
 * [`cpsbm_graph_free`].
 */
int cpsbm_graph_load(const char *path, CpsbmGraph **out);

/**
 * Builds a graph from parallel arrays of edge endpoints with node ids in
 * `0..n`. Self-loops and duplicate edges are dropped.
 *
 * # Safety
 * `src` and `dst` must be valid for `m` reads each (or null when `m` is 0)
 * and `out` must be valid for a pointer write.
 */
int cpsbm_graph_from_edges(uint32_t n,
                           const uint32_t *src,
                           const uint32_t *dst,
                           size_t m,
                           CpsbmGraph **out);

/**
 * Releases a graph handle. Null is a no-op.
 *
 * # Safety
 * `g` must be null or a pointer previously returned by a `cpsbm_graph_*`
 * constructor and not freed since.
 */
void cpsbm_graph_free(CpsbmGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle and `out` valid for one write.
 */
int cpsbm_graph_node_count(const CpsbmGraph *g, size_t *out);

/**
 * # Safety
 * `g` must be a live graph handle and `out` valid for one write.
 */
int cpsbm_graph_edge_count(const CpsbmGraph *g, size_t *out);

/**
 * Exact k-core decomposition; writes one core number per node.
 *
 * # Safety
 * `g` must be a live graph handle; `out_cores` must be valid for
 * `cpsbm_graph_node_count` writes.
 */
int cpsbm_kcores(const CpsbmGraph *g, uint32_t *out_cores);

/**
 * Combinatorial two-block baseline. Writes 0 (core) or 1 (periphery) per
 * node plus the core size and the objective value.
 *
 * # Safety
 * `g` must be a live graph handle; `out_blocks` must be valid for
 * `cpsbm_graph_node_count` writes; `out_core_size` and `out_z` for one
 * write each.
 */
int cpsbm_two_block(const CpsbmGraph *g,
                    uint32_t *out_blocks,
                    size_t *out_core_size,
                    uint64_t *out_z);

/**
 * Fits one model family by Gibbs sampling with restarts and returns the
 * fewest-bits fit. `layers` selects the family: 0 for hub-and-spoke, ≥ 2
 * for that many layers.
 *
 * # Safety
 * `g` must be a live graph handle and `out` valid for a pointer write. On
 * success `*out` owns the fit; release it with [`cpsbm_fit_free`].
 */
int cpsbm_fit(const CpsbmGraph *g,
              uint32_t layers,
              uint32_t sweeps,
              uint32_t mcmc_per_node,
              uint32_t restarts,
              uint64_t dl_samples,
              uint64_t seed,
              CpsbmFit **out);

/**
 * Releases a fit handle. Null is a no-op.
 *
 * # Safety
 * `f` must be null or a pointer returned by [`cpsbm_fit`] and not freed
 * since.
 */
void cpsbm_fit_free(CpsbmFit *f);

/**
 * Description length of the graph under this fit, in bits.
 *
 * # Safety
 * `f` must be a live fit handle and `out` valid for one write.
 */
int cpsbm_fit_bits(const CpsbmFit *f, double *out);

/**
 * Description length per edge, in bits.
 *
 * # Safety
 * `f` must be a live fit handle and `out` valid for one write.
 */
int cpsbm_fit_bits_per_edge(const CpsbmFit *f, double *out);

/**
 * Effective sample size of the evidence estimate.
 *
 * # Safety
 * `f` must be a live fit handle and `out` valid for one write.
 */
int cpsbm_fit_ess(const CpsbmFit *f, double *out);

/**
 * Accepted fraction of label moves over the winning chain.
 *
 * # Safety
 * `f` must be a live fit handle and `out` valid for one write.
 */
int cpsbm_fit_acceptance_rate(const CpsbmFit *f, double *out);

/**
 * Number of blocks in the fitted partition.
 *
 * # Safety
 * `f` must be a live fit handle and `out` valid for one write.
 */
int cpsbm_fit_block_count(const CpsbmFit *f, uint32_t *out);

/**
 * Writes the fitted block label (0-based, 0 = innermost) of every node.
 *
 * # Safety
 * `f` must be a live fit handle; `out_blocks` must be valid for as many
 * writes as the fitted graph has nodes.
 */
int cpsbm_fit_blocks(const CpsbmFit *f, uint32_t *out_blocks);

/**
 * Writes the posterior coreness (0 = peripheral, larger = more core-like)
 * of every node.
 *
 * # Safety
 * `f` must be a live fit handle; `out_coreness` must be valid for as many
 * writes as the fitted graph has nodes.
 */
int cpsbm_fit_coreness(const CpsbmFit *f, double *out_coreness);

/**
 * Writes the posterior-mean block densities, outermost last. The buffer
 * needs 3 elements for the hub family and `layers` for the layered one.
 *
 * # Safety
 * `f` must be a live fit handle; `out_densities` must be valid for
 * `out_len` writes where `out_len` is at least the density count.
 */
int cpsbm_fit_densities(const CpsbmFit *f, double *out_densities, size_t out_len);

/**
 * Monte Carlo description length of `g` under a fixed partition, in bits.
 * `blocks` holds one 0-based label per node; `layers` selects the family
 * as in [`cpsbm_fit`]; `estimator` is 0 auto, 1 naive, 2 importance.
 *
 * # Safety
 * `g` must be a live graph handle; `blocks` must be valid for
 * `cpsbm_graph_node_count` reads; `out_bits` and `out_ess` for one write
 * each.
 */
int cpsbm_estimate_dl(const CpsbmGraph *g,
                      const uint32_t *blocks,
                      uint32_t layers,
                      int estimator,
                      uint64_t samples,
                      uint64_t seed,
                      double *out_bits,
                      double *out_ess);

/**
 * Variation of information between two partitions, in bits. Inputs are two
 * 0-based label arrays of length `n`.
 *
 * # Safety
 * `a` and `b` must be valid for `n` reads; `out` for one write.
 */
int cpsbm_vi(const uint32_t *a, const uint32_t *b, size_t n, double *out);

/**
 * Variation of information normalized by the joint entropy (0..1). Inputs
 * are two 0-based label arrays of length `n`.
 *
 * # Safety
 * `a` and `b` must be valid for `n` reads; `out` for one write.
 */
int cpsbm_nvi(const uint32_t *a, const uint32_t *b, size_t n, double *out);

/**
 * Adjusted mutual information (1 = identical up to labels). Inputs are two
 * 0-based label arrays of length `n`.
 *
 * # Safety
 * `a` and `b` must be valid for `n` reads; `out` for one write.
 */
int cpsbm_ami(const uint32_t *a, const uint32_t *b, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CPSBM_H */
