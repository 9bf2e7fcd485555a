#ifndef NASHMG_H
#define NASHMG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NashmgStatus {
  NASHMG_STATUS_OK = 0,
  NASHMG_STATUS_NULL_POINTER = 1,
  NASHMG_STATUS_INVALID_ARGUMENT = 2,
  NASHMG_STATUS_DIMENSION_MISMATCH = 3,
  NASHMG_STATUS_MALFORMED_INPUT = 4,
  NASHMG_STATUS_IO = 5,
  NASHMG_STATUS_SOLVER_FAILURE = 6,
  NASHMG_STATUS_BUDGET_EXCEEDED = 7,
  NASHMG_STATUS_PANIC = 8,
} NashmgStatus;

/**
 * Tabular zero-sum Markov game.
 */
typedef struct NashmgGame NashmgGame;

/**
 * Max-player and min-player strategies.
 */
typedef struct NashmgPolicyPair NashmgPolicyPair;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread; empty after a
 * successful call. Valid until the next library call on the same thread.
 */
const char *nashmg_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nashmg_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void nashmg_string_free(char *s);

/**
 * Generates a random game with the given sizes.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum NashmgStatus nashmg_game_generate(size_t states,
                                       size_t actions_max,
                                       size_t actions_min,
                                       size_t horizon,
                                       uint64_t seed,
                                       struct NashmgGame **out);

/**
 * Parses a game from the JSON environment format.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid handle slot.
 */
enum NashmgStatus nashmg_game_from_json(const char *json, struct NashmgGame **out);

/**
 * Loads a game from an environment file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid handle slot.
 */
enum NashmgStatus nashmg_game_load(const char *path, struct NashmgGame **out);

/**
 * Serializes a game; release the result with [`nashmg_string_free`].
 *
 * # Safety
 * `game` must be a live handle and `out` a valid pointer.
 */
enum NashmgStatus nashmg_game_to_json(const struct NashmgGame *game, char **out);

/**
 * Writes horizon, state count and both action counts.
 *
 * # Safety
 * `game` must be a live handle; the output pointers must be valid.
 */
enum NashmgStatus nashmg_game_dims(const struct NashmgGame *game,
                                   size_t *horizon,
                                   size_t *states,
                                   size_t *actions_max,
                                   size_t *actions_min);

/**
 * Releases a game. Null is ignored.
 *
 * # Safety
 * `game` must come from this library and not have been freed already.
 */
void nashmg_game_free(struct NashmgGame *game);

/**
 * Solves the game exactly, writing the value at the initial state and,
 * when `pair_out` is not null, an equilibrium policy pair.
 *
 * # Safety
 * `game` must be a live handle and `value` valid; `pair_out` may be null.
 */
enum NashmgStatus nashmg_game_solve(const struct NashmgGame *game,
                                    double *value,
                                    struct NashmgPolicyPair **pair_out);

/**
 * Parses a policy pair from the JSON policy format.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid handle slot.
 */
enum NashmgStatus nashmg_policy_pair_from_json(const char *json, struct NashmgPolicyPair **out);

/**
 * Serializes a policy pair; release the result with [`nashmg_string_free`].
 *
 * # Safety
 * `pair` must be a live handle and `out` a valid pointer.
 */
enum NashmgStatus nashmg_policy_pair_to_json(const struct NashmgPolicyPair *pair, char **out);

/**
 * Releases a policy pair. Null is ignored.
 *
 * # Safety
 * `pair` must come from this library and not have been freed already.
 */
void nashmg_policy_pair_free(struct NashmgPolicyPair *pair);

/**
 * Exact exploitability of `pair` in `game`. A `node_budget` of zero selects
 * the default history-search budget.
 *
 * # Safety
 * Both handles must be live and `out` valid.
 */
enum NashmgStatus nashmg_exploitability(const struct NashmgGame *game,
                                        const struct NashmgPolicyPair *pair,
                                        size_t node_budget,
                                        double *out);

/**
 * Solves the `rows × cols` matrix game with row-major `entries` (payoffs to
 * the row player). Writes `rows` and `cols` probabilities to `row_strategy`
 * and `col_strategy`, the value to `value` and the duality gap to `eps`;
 * `eps` may be null.
 *
 * # Safety
 * `entries` must hold `rows·cols` doubles; the strategy buffers must hold
 * `rows` and `cols` doubles respectively.
 */
enum NashmgStatus nashmg_solve_matrix(size_t rows,
                                      size_t cols,
                                      const double *entries,
                                      double tol,
                                      double *row_strategy,
                                      double *col_strategy,
                                      double *value,
                                      double *eps);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NASHMG_H */
