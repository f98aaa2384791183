#ifndef WSR_MINIMAX_H
#define WSR_MINIMAX_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WsrConstraintKind {
  WSR_CONSTRAINT_KIND_TOTAL = 0,
  WSR_CONSTRAINT_KIND_PER_LINK = 1,
  WSR_CONSTRAINT_KIND_GROUPED = 2,
} WsrConstraintKind;

/**
 * Result of every fallible call.
 */
typedef enum WsrStatus {
  WSR_STATUS_OK = 0,
  WSR_STATUS_NULL_POINTER = 1,
  WSR_STATUS_INVALID_UTF8 = 2,
  WSR_STATUS_PARSE = 3,
  WSR_STATUS_INVALID_NETWORK = 4,
  WSR_STATUS_INVALID_SCENARIO = 5,
  WSR_STATUS_INVALID_CONFIG = 6,
  WSR_STATUS_DIMENSION_MISMATCH = 7,
  WSR_STATUS_UNSUPPORTED_MODE = 8,
  /**
   * The iteration failed: infeasible start, bisection failure, a
   * decreasing step and similar.
   */
  WSR_STATUS_SOLVER = 9,
  WSR_STATUS_IO = 10,
  /**
   * An index or buffer length is out of range.
   */
  WSR_STATUS_OUT_OF_RANGE = 11,
  WSR_STATUS_PANIC = 12,
} WsrStatus;

typedef enum WsrTermination {
  WSR_TERMINATION_KKT_CONVERGED = 0,
  WSR_TERMINATION_OBJECTIVE_STALLED = 1,
  WSR_TERMINATION_MAX_ITERATIONS = 2,
} WsrTermination;

typedef enum WsrVerdict {
  WSR_VERDICT_PASS = 0,
  WSR_VERDICT_FAIL = 1,
  WSR_VERDICT_DEGENERATE = 2,
} WsrVerdict;

/**
 * Opaque network handle.
 */
typedef struct WsrNetwork WsrNetwork;

/**
 * Opaque result of a solve.
 */
typedef struct WsrSolution WsrSolution;

/**
 * Parameters of a generated network. Only the fields of the chosen
 * constraint kind are read.
 */
typedef struct WsrScenario {
  size_t links;
  size_t tx_antennas;
  size_t rx_antennas;
  double interference_scale;
  double weight_min;
  double weight_max;
  enum WsrConstraintKind constraint;
  double total_power;
  uint32_t perlink_min;
  uint32_t perlink_max;
  size_t cell_size;
  double cell_power;
} WsrScenario;

typedef struct WsrSolverConfig {
  size_t max_iters;
  /**
   * Relative objective gain over three steps below which the run stops;
   * zero disables the test.
   */
  double obj_tol;
  double kkt_tol;
} WsrSolverConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call on the same thread.
 */
const char *wsr_last_error(void);

/**
 * Library version as a static string.
 */
const char *wsr_version(void);

/**
 * Ten links, 3 transmit and 4 receive antennas, weights in `[0.5, 1]`,
 * total power 10.
 */
struct WsrScenario wsr_scenario_reference(double interference_scale);

struct WsrSolverConfig wsr_solver_config_default(void);

/**
 * Draws a network from `scenario` with `seed`.
 *
 * # Safety
 * `scenario` must be null or valid for reads and `out` null or valid for
 * writes.
 */
enum WsrStatus wsr_network_random(uint64_t seed,
                                  const struct WsrScenario *scenario,
                                  struct WsrNetwork **out);

/**
 * Parses a network in the text format.
 *
 * # Safety
 * `text` must be null or a NUL-terminated string; `out` null or valid for
 * writes.
 */
enum WsrStatus wsr_network_from_text(const char *text, struct WsrNetwork **out);

/**
 * Serializes a network; release the string with [`wsr_string_free`].
 *
 * # Safety
 * `net` must be null or a live handle; `out` null or valid for writes.
 */
enum WsrStatus wsr_network_to_text(const struct WsrNetwork *net, char **out);

/**
 * Number of links, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t wsr_network_num_links(const struct WsrNetwork *net);

/**
 * # Safety
 * `net` must be null or a handle not yet freed.
 */
void wsr_network_free(struct WsrNetwork *net);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void wsr_string_free(char *s);

/**
 * Runs the solver from the default start. A null `config` uses the
 * defaults.
 *
 * # Safety
 * `net` must be null or a live handle, `config` null or valid for reads,
 * `out` null or valid for writes.
 */
enum WsrStatus wsr_solve(const struct WsrNetwork *net,
                         const struct WsrSolverConfig *config,
                         struct WsrSolution **out);

/**
 * Weighted sum-rate in nats, or NaN for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
double wsr_solution_objective(const struct WsrSolution *sol);

/**
 * # Safety
 * `sol` must be null or a live handle.
 */
size_t wsr_solution_iterations(const struct WsrSolution *sol);

/**
 * Largest KKT residual at the returned point, or NaN for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
double wsr_solution_kkt_residual(const struct WsrSolution *sol);

/**
 * # Safety
 * `sol` must be null or a live handle; `out` null or valid for writes.
 */
enum WsrStatus wsr_solution_termination(const struct WsrSolution *sol, enum WsrTermination *out);

/**
 * Copies the dual prices, one per constraint group, into `buf`. `len`
 * must be at least the group count, which is written to `written`.
 *
 * # Safety
 * `sol` must be null or a live handle, `buf` valid for `len` writes,
 * `written` null or valid for writes.
 */
enum WsrStatus wsr_solution_prices(const struct WsrSolution *sol,
                                   double *buf,
                                   size_t len,
                                   size_t *written);

/**
 * # Safety
 * `sol` must be null or a handle not yet freed.
 */
void wsr_solution_free(struct WsrSolution *sol);

/**
 * Solves `net`, maps the result to the reciprocal network and checks that
 * both achieve the same weighted sum-rate. `objective_gap` may be null;
 * it receives NaN when the map is degenerate.
 *
 * # Safety
 * `net` must be null or a live handle, `config` null or valid for reads,
 * `verdict` null or valid for writes, `objective_gap` null or valid for
 * writes.
 */
enum WsrStatus wsr_certify(const struct WsrNetwork *net,
                           const struct WsrSolverConfig *config,
                           enum WsrVerdict *verdict,
                           double *objective_gap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WSR_MINIMAX_H */
