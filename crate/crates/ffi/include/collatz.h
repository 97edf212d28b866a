/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#ifndef COLLATZ_H
#define COLLATZ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CollatzStatus {
  COLLATZ_STATUS_OK = 0,
  COLLATZ_STATUS_EVEN_INPUT = 1,
  COLLATZ_STATUS_ZERO_INPUT = 2,
  COLLATZ_STATUS_INPUT_TOO_LARGE = 3,
  COLLATZ_STATUS_INVALID_BASE = 4,
  COLLATZ_STATUS_OUT_OF_RANGE = 5,
  COLLATZ_STATUS_INVALID_ARGUMENT = 6,
  COLLATZ_STATUS_NULL_POINTER = 7,
  COLLATZ_STATUS_BUFFER_TOO_SMALL = 8,
  COLLATZ_STATUS_INTERNAL = 9,
} CollatzStatus;

typedef enum CollatzParity {
  COLLATZ_PARITY_FREE = 0,
  COLLATZ_PARITY_FORCE_ODD = 1,
} CollatzParity;

typedef enum CollatzLabel {
  COLLATZ_LABEL_CORRECT = 0,
  COLLATZ_LABEL_POWER_OF_TWO = 1,
  COLLATZ_LABEL_NEAR_POWER_OF_TWO = 2,
  COLLATZ_LABEL_TRUNCATED = 3,
  COLLATZ_LABEL_HARD = 4,
  COLLATZ_LABEL_CLOSE_MISS = 5,
  COLLATZ_LABEL_OTHER = 6,
} CollatzLabel;

/**
 * Opaque frontier handle.
 */
typedef struct CollatzFrontier CollatzFrontier;

/**
 * An unsigned 128-bit integer as two 64-bit halves.
 */
typedef struct CollatzU128 {
  uint64_t hi;
  uint64_t lo;
} CollatzU128;

typedef struct CollatzStep {
  uint64_t n;
  struct CollatzU128 kappa;
  struct CollatzU128 apex;
  uint32_t k;
  uint32_t k_prime;
} CollatzStep;

typedef struct CollatzPrediction {
  uint64_t n;
  struct CollatzU128 target;
  struct CollatzU128 prediction;
  /**
   * `Correct`, `PowerOfTwo` or `Hard`.
   */
  enum CollatzLabel label;
  uint32_t a;
  uint32_t l;
} CollatzPrediction;

/**
 * An error class. Fields not used by `label` are zero.
 */
typedef struct CollatzClass {
  enum CollatzLabel label;
  uint32_t a;
  uint32_t l;
  uint32_t depth;
  /**
   * `|ε|` of a near power-of-two error.
   */
  struct CollatzU128 epsilon;
  bool epsilon_negative;
  /**
   * Relative bound of a close-miss tier (0.001, 0.01 or 0.03).
   */
  double close_bound;
} CollatzClass;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static, NUL-terminated description of a status code.
 */
const char *collatz_status_message(enum CollatzStatus status);

/**
 * Long Collatz step of an odd `n` in `[1, 2^63]`.
 */
enum CollatzStatus collatz_long_step(uint64_t n, struct CollatzStep *result);

/**
 * Loop lengths read from the binary suffix of `n`.
 */
enum CollatzStatus collatz_loop_lengths(uint64_t n, uint32_t *k, uint32_t *k_prime);

/**
 * Writes the NUL-terminated binary suffix of class `(k, k_prime)` into
 * `buffer`. `required`, if not null, receives the size needed including the
 * terminator; with a short buffer the status is `BUFFER_TOO_SMALL`.
 */
enum CollatzStatus collatz_class_suffix(uint32_t k,
                                        uint32_t k_prime,
                                        char *buffer,
                                        size_t capacity,
                                        size_t *required);

/**
 * Creates the canonical frontier of a learning step (1..=16).
 */
enum CollatzStatus collatz_frontier_canonical(uint32_t step, struct CollatzFrontier **handle);

/**
 * Creates a frontier from per-`k` limits `l'_1 .. l'_len`.
 */
enum CollatzStatus collatz_frontier_from_limits(const uint32_t *limits,
                                                size_t len,
                                                struct CollatzFrontier **handle);

/**
 * Releases a frontier. Null is ignored.
 */
void collatz_frontier_free(struct CollatzFrontier *handle);

enum CollatzStatus collatz_frontier_k_max(const struct CollatzFrontier *handle, uint32_t *k_max);

/**
 * Expected accuracy of a frontier as the exact fraction
 * `numerator / denominator`; `OUT_OF_RANGE` if either does not fit 64 bits.
 */
enum CollatzStatus collatz_expected_accuracy(const struct CollatzFrontier *handle,
                                             uint64_t *numerator,
                                             uint64_t *denominator);

/**
 * Emulated model prediction for `n`.
 */
enum CollatzStatus collatz_predict(uint64_t n,
                                   const struct CollatzFrontier *handle,
                                   enum CollatzParity parity,
                                   struct CollatzPrediction *result);

/**
 * Error class of `prediction` against `target` in `base`, with the default
 * tolerances.
 */
enum CollatzStatus collatz_classify(struct CollatzU128 target,
                                    struct CollatzU128 prediction,
                                    uint32_t base,
                                    struct CollatzClass *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COLLATZ_H */
