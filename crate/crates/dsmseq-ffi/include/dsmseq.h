#ifndef DSMSEQ_H
#define DSMSEQ_H

/* Generated by cbindgen from the dsmseq-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
enum DsmStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  DSM_STATUS_OK = 0,
  DSM_STATUS_NULL_ARGUMENT = 1,
  DSM_STATUS_INVALID_UTF8 = 2,
  DSM_STATUS_INVALID_CASE = 3,
  DSM_STATUS_INVALID_SEQUENCE = 4,
  DSM_STATUS_CASE_TOO_LARGE = 5,
  DSM_STATUS_INVALID_CONFIG = 6,
  DSM_STATUS_IO = 7,
  DSM_STATUS_INTERNAL = 8,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum DsmStatus DsmStatus;
#else
typedef int32_t DsmStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Ranking method selector.
enum DsmRanker
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  DSM_RANKER_OUT_IN_DEGREE = 0,
  DSM_RANKER_EIGENVECTOR = 1,
  DSM_RANKER_WALK_EXPONENTIAL = 2,
  DSM_RANKER_WALK_RESOLVENT = 3,
  DSM_RANKER_VISIBILITY = 4,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum DsmRanker DsmRanker;
#else
typedef int32_t DsmRanker;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Genetic-algorithm preset selector.
enum DsmGaPreset
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  DSM_GA_PRESET_EXPLORATION = 0,
  DSM_GA_PRESET_EXPLOITATION = 1,
  DSM_GA_PRESET_BALANCED = 2,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum DsmGaPreset DsmGaPreset;
#else
typedef int32_t DsmGaPreset;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Opaque dependency-network handle.
typedef struct DsmCaseHandle DsmCaseHandle;

// Structural metrics of a dependency network.
typedef struct DsmMetrics {
  uint32_t node_count;
  uint32_t edge_count;
  double density;
  double average_degree;
  // Longest shortest path on the undirected projection (largest
  // component when disconnected).
  uint32_t diameter;
  double clustering_coefficient;
  double average_path_length;
  // 1 when the undirected projection is a single connected component.
  uint8_t projection_connected;
} DsmMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or NULL when
// no call has failed yet. The pointer stays valid until the next failing
// call on the same thread; do not free it.
const char *dsm_last_error_message(void);

// Parse a case from a JSON document.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be a valid pointer.
DsmStatus dsm_case_from_json(const char *json, struct DsmCaseHandle **out);

// Load a case from a JSON file on disk.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be a valid pointer.
DsmStatus dsm_case_load(const char *path, struct DsmCaseHandle **out);

// Release a handle returned by any constructor. NULL is a no-op.
//
// # Safety
// `handle` must come from this library and not be freed twice.
void dsm_case_free(struct DsmCaseHandle *handle);

// Release a string returned by this library. NULL is a no-op.
//
// # Safety
// `text` must come from this library and not be freed twice.
void dsm_string_free(char *text);

// Number of nodes, or 0 when `handle` is NULL.
//
// # Safety
// `handle` must be a live handle from this library (or NULL).
uint32_t dsm_case_node_count(const struct DsmCaseHandle *handle);

// Number of directed edges, or 0 when `handle` is NULL.
//
// # Safety
// `handle` must be a live handle from this library (or NULL).
uint32_t dsm_case_edge_count(const struct DsmCaseHandle *handle);

// Copy of the case with fresh seeded random node ids (structure, names,
// and descriptions preserved).
//
// # Safety
// `handle` must be a live handle; `out` must be a valid pointer.
DsmStatus dsm_case_randomize_ids(const struct DsmCaseHandle *handle,
                                 uint64_t seed,
                                 struct DsmCaseHandle **out);

// Count dependencies pointing backwards in `sequence` (comma-separated
// node ids covering every node exactly once).
//
// # Safety
// `handle` must be a live handle; `sequence` a NUL-terminated string;
// `out_feedback` a valid pointer.
DsmStatus dsm_feedback_count(const struct DsmCaseHandle *handle,
                             const char *sequence,
                             uint32_t *out_feedback);

// Structural metrics of the network.
//
// # Safety
// `handle` must be a live handle; `out` a valid pointer.
DsmStatus dsm_network_metrics(const struct DsmCaseHandle *handle, struct DsmMetrics *out);

// Exhaustive minimum-feedback search. `node_limit` of 0 keeps the built-in
// safety limit. Writes the optimal order (comma-separated, caller frees)
// and its feedback count.
//
// # Safety
// `handle` must be a live handle; out pointers must be valid.
DsmStatus dsm_brute_force_optimum(const struct DsmCaseHandle *handle,
                                  uint32_t node_limit,
                                  char **out_order,
                                  uint32_t *out_feedback);

// Order the case with one deterministic ranking method. `delta` applies to
// the resolvent walk only; pass NaN for the default damping.
//
// # Safety
// `handle` must be a live handle; out pointers must be valid.
DsmStatus dsm_rank(const struct DsmCaseHandle *handle,
                   DsmRanker method,
                   double delta,
                   uint64_t seed,
                   char **out_order,
                   uint32_t *out_feedback);

// Run the genetic algorithm under a preset. `generations` of 0 keeps the
// preset default. Writes the best order found and its feedback count.
//
// # Safety
// `handle` must be a live handle; out pointers must be valid.
DsmStatus dsm_ga_run(const struct DsmCaseHandle *handle,
                     DsmGaPreset preset,
                     uint64_t seed,
                     uint64_t generations,
                     char **out_order,
                     uint32_t *out_feedback);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DSMSEQ_H */
