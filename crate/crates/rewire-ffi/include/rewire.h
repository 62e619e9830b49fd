#ifndef REWIRE_H
#define REWIRE_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum RewireStatus {
  REWIRE_STATUS_OK = 0,
  REWIRE_STATUS_NULL_POINTER = 1,
  REWIRE_STATUS_INVALID_ARGUMENT = 2,
  REWIRE_STATUS_PARSE_ERROR = 3,
  REWIRE_STATUS_COMPUTE_ERROR = 4,
  REWIRE_STATUS_IO_ERROR = 5,
  REWIRE_STATUS_TIMEOUT = 6,
  REWIRE_STATUS_INTERNAL_ERROR = 7,
} RewireStatus;

/**
 * Graph families exposed through the C API.
 */
typedef enum RewireGraphModel {
  REWIRE_GRAPH_MODEL_BA1 = 0,
  REWIRE_GRAPH_MODEL_BA2 = 1,
  REWIRE_GRAPH_MODEL_ER = 2,
  REWIRE_GRAPH_MODEL_WS = 3,
} RewireGraphModel;

/**
 * Objective functions exposed through the C API.
 */
typedef enum RewireObjective {
  REWIRE_OBJECTIVE_SHANNON = 0,
  REWIRE_OBJECTIVE_MERW = 1,
} RewireObjective;

/**
 * Entry-node sampling rule for attack evaluation.
 */
typedef enum RewireEntryRule {
  /**
   * min(n, 30) entries.
   */
  REWIRE_ENTRY_RULE_SYNTHETIC = 0,
  /**
   * every node.
   */
  REWIRE_ENTRY_RULE_ALL = 1,
} RewireEntryRule;

/**
 * Opaque graph handle.
 */
typedef struct RewireGraph RewireGraph;

/**
 * Opaque model-checkpoint handle.
 */
typedef struct RewireModel RewireModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *rewire_last_error_message(void);

/**
 * Parse the `n <count>` / `i j` edge-list format.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum RewireStatus rewire_graph_parse(const char *text, struct RewireGraph **out);

/**
 * Generate a connected graph from one of the built-in families with the
 * parameters used throughout the engine (BA m=1/2, ER p=0.15, WS k=4
 * p=0.1).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RewireStatus rewire_graph_generate(enum RewireGraphModel model,
                                        uintptr_t n,
                                        uint64_t seed,
                                        struct RewireGraph **out);

/**
 * # Safety
 * `g` must come from this library and not have been freed.
 */
void rewire_graph_free(struct RewireGraph *g);

/**
 * Node count; 0 for a null handle.
 *
 * # Safety
 * `g` must be a live handle or null.
 */
uintptr_t rewire_graph_node_count(const struct RewireGraph *g);

/**
 * Edge count; 0 for a null handle.
 *
 * # Safety
 * `g` must be a live handle or null.
 */
uintptr_t rewire_graph_edge_count(const struct RewireGraph *g);

/**
 * # Safety
 * `g` must be a live handle or null.
 */
bool rewire_graph_has_edge(const struct RewireGraph *g, uintptr_t i, uintptr_t j);

/**
 * # Safety
 * `g` must be a live handle or null.
 */
bool rewire_graph_is_connected(const struct RewireGraph *g);

/**
 * Serialize to the canonical edge-list text; free with
 * `rewire_string_free`.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer.
 */
enum RewireStatus rewire_graph_serialize(const struct RewireGraph *g, char **out);

/**
 * # Safety
 * `s` must have been returned by this library and not already freed.
 */
void rewire_string_free(char *s);

/**
 * Evaluate an objective on a graph (MERW requires connectivity).
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer.
 */
enum RewireStatus rewire_objective_evaluate(const struct RewireGraph *g,
                                            enum RewireObjective objective,
                                            double *out);

/**
 * One uniform-random rewiring episode. `out_delta` is NaN when the final
 * graph is disconnected; `out_final` (optional) receives the final graph.
 *
 * # Safety
 * `g` must be a live handle; out pointers may each be null to skip them.
 */
enum RewireStatus rewire_random_episode(const struct RewireGraph *g,
                                        enum RewireObjective objective,
                                        double budget_fraction,
                                        uint64_t seed,
                                        double *out_delta,
                                        bool *out_connected,
                                        struct RewireGraph **out_final);

/**
 * One greedy episode; the final graph is always connected.
 * `timeout_ms = 0` disables the deadline; hitting it returns
 * `RewireStatus::Timeout`.
 *
 * # Safety
 * `g` must be a live handle; out pointers may each be null to skip them.
 */
enum RewireStatus rewire_greedy_episode(const struct RewireGraph *g,
                                        enum RewireObjective objective,
                                        double budget_fraction,
                                        uint64_t timeout_ms,
                                        double *out_delta,
                                        struct RewireGraph **out_final);

/**
 * One greedy-policy episode under a trained model.
 *
 * # Safety
 * `model` and `g` must be live handles; out pointers may each be null.
 */
enum RewireStatus rewire_policy_episode(const struct RewireModel *model,
                                        const struct RewireGraph *g,
                                        enum RewireObjective objective,
                                        double budget_fraction,
                                        double *out_delta,
                                        bool *out_connected,
                                        struct RewireGraph **out_final);

/**
 * Load a model checkpoint written by the training pipeline.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum RewireStatus rewire_model_load(const char *path, struct RewireModel **out);

/**
 * # Safety
 * `model` must come from this library and not have been freed.
 */
void rewire_model_free(struct RewireModel *model);

/**
 * Mean normalized attacker random-walk cost of the rewiring
 * `g0 -> g_star`, averaged over sampled entry nodes.
 *
 * # Safety
 * `g0` and `g_star` must be live handles and `out_mean_normalized` a valid
 * pointer.
 */
enum RewireStatus rewire_attack_evaluate(const struct RewireGraph *g0,
                                         const struct RewireGraph *g_star,
                                         enum RewireEntryRule entry_rule,
                                         uintptr_t hops,
                                         uint64_t seed,
                                         double *out_mean_normalized);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REWIRE_H */
