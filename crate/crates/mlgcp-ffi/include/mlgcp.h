#ifndef MLGCP_H
#define MLGCP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Solve outcome codes mirrored into `MlgcpReport.status`.
 */
#define MLGCP_SOLVE_OPTIMAL 0

#define MLGCP_SOLVE_TIME_LIMIT 1

#define MLGCP_SOLVE_INFEASIBLE 2

/**
 * Error codes returned by every fallible entry point.
 */
typedef enum MlgcpStatus {
  MlgcpOk = 0,
  MlgcpNullPointer = 1,
  MlgcpInvalidInput = 2,
  MlgcpSolveFailed = 3,
} MlgcpStatus;

/**
 * Opaque instance handle.
 */
typedef struct MlgcpGraph MlgcpGraph;

/**
 * Opaque solution handle; query it with the accessor functions.
 */
typedef struct MlgcpSolution MlgcpSolution;

/**
 * Flat solve summary.
 */
typedef struct MlgcpReport {
  double cost;
  double lower_bound;
  double gap_percent;
  uint64_t nodes;
  uint64_t cuts;
  double wall_time_s;
  int status;
  uint64_t num_labels_in_cut;
} MlgcpReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an instance in the mlgcp text format.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum MlgcpStatus mlgcp_graph_parse(const char *text, struct MlgcpGraph **out);

/**
 * Generates a seeded random connected instance.
 *
 * `scenario`: 0 unicost, 1 random, 2 normal.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MlgcpStatus mlgcp_graph_generate(uint64_t n,
                                      uint64_t num_labels,
                                      double density,
                                      int scenario,
                                      uint64_t seed,
                                      struct MlgcpGraph **out);

/**
 * Basic size queries; any output pointer may be NULL to skip it.
 *
 * # Safety
 * `g` must come from this library.
 */
enum MlgcpStatus mlgcp_graph_counts(const struct MlgcpGraph *g,
                                    uint64_t *num_vertices,
                                    uint64_t *num_edges,
                                    uint64_t *num_labels);

/**
 * # Safety
 * `g` must come from this library and not be freed twice.
 */
void mlgcp_graph_free(struct MlgcpGraph *g);

/**
 * Solves an instance.
 *
 * `model`: 0 part, 1 part2, 2 p3e, 3 eac, 4 brute force, 5 local search.
 * A negative `time_limit_s` means the 3600 s default.
 *
 * # Safety
 * `g` and `out` must be valid pointers from this library / the caller.
 */
enum MlgcpStatus mlgcp_solve(const struct MlgcpGraph *g,
                             int model,
                             double time_limit_s,
                             uint64_t seed,
                             struct MlgcpSolution **out);

/**
 * # Safety
 * `s` and `report` must be valid.
 */
enum MlgcpStatus mlgcp_solution_report(const struct MlgcpSolution *s, struct MlgcpReport *report);

/**
 * Copies up to `buf_len` cut label ids into `buf`; returns the cut size via
 * `written`.
 *
 * # Safety
 * `buf` must point to at least `buf_len` u64 slots.
 */
enum MlgcpStatus mlgcp_solution_labels(const struct MlgcpSolution *s,
                                       uint64_t *buf,
                                       uint64_t buf_len,
                                       uint64_t *written);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void mlgcp_solution_free(struct MlgcpSolution *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MLGCP_H */
