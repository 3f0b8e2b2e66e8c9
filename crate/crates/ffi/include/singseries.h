#ifndef SINGSERIES_H
#define SINGSERIES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_INVALID_PARAMETER = 1,
  SS_STATUS_ARITHMETIC = 2,
  SS_STATUS_CAPABILITY = 3,
  SS_STATUS_BUDGET = 4,
  SS_STATUS_IO = 5,
  SS_STATUS_NULL_POINTER = 6,
  SS_STATUS_PANIC = 7,
} SsStatus;

/**
 * A polynomial family.
 */
typedef struct SsFamily SsFamily;

/**
 * Primes up to a limit.
 */
typedef struct SsPrimeTable SsPrimeTable;

/**
 * A truncated Euler product.
 */
typedef struct SsEulerValue {
  double value;
  uint64_t cutoff;
  /**
   * Bound on the log of the omitted factors when `rigorous`, otherwise the
   * spread between the cutoff and half the cutoff.
   */
  double tail_log_bound;
  bool rigorous;
  bool exact_zero;
} SsEulerValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or NULL.
 */
const char *ss_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ss_version(void);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ss_string_free(char *s);

/**
 * Deterministic primality for any 64-bit `n`.
 */
bool ss_is_prime(uint64_t n);

/**
 * Sieve the primes up to `limit` (2 <= limit <= 2^40).
 *
 * # Safety
 * `table` must be a valid pointer to writable storage for a handle.
 */
enum SsStatus ss_prime_table_new(uint64_t limit, struct SsPrimeTable **table);

/**
 * # Safety
 * `table` must be NULL or a handle from [`ss_prime_table_new`].
 */
void ss_prime_table_free(struct SsPrimeTable *table);

/**
 * Number of primes in the table; 0 for NULL.
 *
 * # Safety
 * `table` must be NULL or a live handle.
 */
size_t ss_prime_table_len(const struct SsPrimeTable *table);

/**
 * The `index`-th prime (0-based).
 *
 * # Safety
 * `table` must be a live handle and `prime` writable.
 */
enum SsStatus ss_prime_table_get(const struct SsPrimeTable *table, size_t index, uint64_t *prime);

/**
 * Number of primes `<= x` in the table (x is clamped to the table limit).
 *
 * # Safety
 * `table` must be NULL or a live handle.
 */
size_t ss_prime_table_count_up_to(const struct SsPrimeTable *table, uint64_t x);

/**
 * Singular series of the k-tuple `entries[0..k]` truncated at `cutoff`.
 *
 * # Safety
 * `entries` must point to `k` readable values and `value` be writable.
 */
enum SsStatus ss_singular_series_tuple(const uint64_t *entries,
                                       size_t k,
                                       uint64_t cutoff,
                                       struct SsEulerValue *value);

/**
 * Parse a family such as `"x,2*x+1"` or `"x^2+1"`.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `family` writable.
 */
enum SsStatus ss_family_parse(const char *source, struct SsFamily **family);

/**
 * # Safety
 * `family` must be NULL or a handle from [`ss_family_parse`].
 */
void ss_family_free(struct SsFamily *family);

/**
 * Canonical text of the family; release with [`ss_string_free`]. NULL for a NULL handle.
 *
 * # Safety
 * `family` must be NULL or a live handle.
 */
char *ss_family_to_string(const struct SsFamily *family);

/**
 * Number of members.
 *
 * # Safety
 * `family` must be NULL or a live handle.
 */
size_t ss_family_len(const struct SsFamily *family);

/**
 * Partial Euler product of a primitive family (heuristic spread in `tail_log_bound`).
 *
 * # Safety
 * `family` must be a live handle and `value` writable.
 */
enum SsStatus ss_family_singular_series(const struct SsFamily *family,
                                        uint64_t cutoff,
                                        struct SsEulerValue *value);

/**
 * Number of seeds `n <= limit` at which every member is a positive prime.
 *
 * # Safety
 * `family` must be a live handle and `count` writable.
 */
enum SsStatus ss_family_count_seeds(const struct SsFamily *family, uint64_t limit, uint64_t *count);

/**
 * Moment constant `mu_k(m)` truncated at `cutoff`, with its tail bound.
 *
 * # Safety
 * `value` and `tail_log_bound` must be writable.
 */
enum SsStatus ss_mu(uint32_t k, uint32_t m, uint64_t cutoff, double *value, double *tail_log_bound);

/**
 * k-th moment of a Poisson(lambda) variable.
 *
 * # Safety
 * `value` must be writable.
 */
enum SsStatus ss_poisson_moment(uint32_t k, double lambda, double *value);

/**
 * Exact nonvanishing probability as `"num/den"`; release with [`ss_string_free`].
 *
 * # Safety
 * `fraction` must be writable.
 */
enum SsStatus ss_nonvanishing_probability(uint32_t k, char **fraction);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SINGSERIES_H */
