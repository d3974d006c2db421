#ifndef MIL_H
#define MIL_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MilStatus {
  MIL_STATUS_OK = 0,
  MIL_STATUS_NULL_POINTER = 1,
  MIL_STATUS_INVALID_UTF8 = 2,
  MIL_STATUS_INVALID_ARGUMENT = 3,
  MIL_STATUS_IO = 4,
  MIL_STATUS_PARSE = 5,
  /**
   * The search ended without a program.
   */
  MIL_STATUS_NOT_FOUND = 6,
  /**
   * The step cap or the deadline ran out.
   */
  MIL_STATUS_TIMEOUT = 7,
  MIL_STATUS_OUT_OF_RANGE = 8,
  MIL_STATUS_INTERNAL = 9,
} MilStatus;

typedef enum MilStrategy {
  MIL_STRATEGY_NONE = 0,
  MIL_STRATEGY_SYNTACTICAL = 1,
  MIL_STRATEGY_STATISTICAL = 2,
  MIL_STRATEGY_SINGLE = 3,
} MilStrategy;

/**
 * Opaque task corpus.
 */
typedef struct MilCorpus MilCorpus;

/**
 * Opaque result of learning a corpus.
 */
typedef struct MilRun MilRun;

/**
 * Opaque learner over user-supplied background facts and metarules.
 */
typedef struct MilSession MilSession;

typedef struct MilRunOptions {
  enum MilStrategy strategy;
  /**
   * Milliseconds per task per depth; 0 disables the wall-clock limit.
   */
  uint64_t timeout_ms;
  /**
   * Resolution steps per task per depth.
   */
  uint64_t step_cap;
  uint32_t max_size;
  uint32_t parallelism;
} MilRunOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread. Empty after a success.
 * Valid until the next call into the library on the same thread.
 */
const char *mil_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void mil_string_free(char *s);

struct MilRunOptions mil_run_options_default(void);

/**
 * # Safety
 * `domain` must be a NUL-terminated string and `out` a writable pointer.
 */
enum MilStatus mil_corpus_generate(const char *domain,
                                   size_t tasks,
                                   uint64_t seed,
                                   struct MilCorpus **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum MilStatus mil_corpus_load(const char *path, struct MilCorpus **out);

/**
 * # Safety
 * `corpus` must be a live handle and `path` a NUL-terminated string.
 */
enum MilStatus mil_corpus_save(const struct MilCorpus *corpus, const char *path);

/**
 * # Safety
 * `corpus` must be a live handle and `out` a writable pointer.
 */
enum MilStatus mil_corpus_len(const struct MilCorpus *corpus, size_t *out);

/**
 * Serialized corpus; release with `mil_string_free`.
 *
 * # Safety
 * `corpus` must be a live handle and `out` a writable pointer.
 */
enum MilStatus mil_corpus_to_text(const struct MilCorpus *corpus, char **out);

/**
 * # Safety
 * `corpus` must be null or a handle from this library, not yet freed.
 */
void mil_corpus_free(struct MilCorpus *corpus);

/**
 * Learns every task of the corpus.
 *
 * # Safety
 * `corpus` must be a live handle, `options` null or valid, `out` writable.
 */
enum MilStatus mil_corpus_learn(const struct MilCorpus *corpus,
                                const struct MilRunOptions *options,
                                struct MilRun **out);

/**
 * # Safety
 * `run` must be a live handle and `out` a writable pointer.
 */
enum MilStatus mil_run_solved(const struct MilRun *run, size_t *out);

/**
 * The program learned for task `index`, or `MIL_STATUS_NOT_FOUND` when the task is unsolved.
 *
 * # Safety
 * `run` must be a live handle and `out` a writable pointer.
 */
enum MilStatus mil_run_program(const struct MilRun *run, size_t index, char **out);

/**
 * The run as one CSV line (no header, no newline).
 *
 * # Safety
 * `run` must be a live handle and `out` a writable pointer.
 */
enum MilStatus mil_run_csv_row(const struct MilRun *run, char **out);

/**
 * # Safety
 * `run` must be null or a handle from this library, not yet freed.
 */
void mil_run_free(struct MilRun *run);

/**
 * A learner with the standard metarules and an empty background.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum MilStatus mil_session_new(struct MilSession **out);

/**
 * Adds background clauses. Predicates defined only by ground facts become
 * extensional tables; the rest are kept as rules.
 *
 * # Safety
 * `session` must be a live handle and `clauses` a NUL-terminated string.
 */
enum MilStatus mil_session_add_background(struct MilSession *session, const char *clauses);

/**
 * Replaces the metarules, one per line, e.g. `chain: P(A,B) :- Q(A,C), R(C,B).`
 *
 * # Safety
 * `session` must be a live handle and `metarules` a NUL-terminated string.
 */
enum MilStatus mil_session_set_metarules(struct MilSession *session, const char *metarules);

/**
 * Learns a program for the predicate named in the examples. Both arguments
 * are sequences of ground atoms ending in `.`; `negatives` may be null.
 * With `keep` nonzero the program joins the background, so later tasks
 * may call it.
 *
 * # Safety
 * `session` must be a live handle, the strings NUL-terminated, `out` writable.
 */
enum MilStatus mil_session_learn(struct MilSession *session,
                                 const char *positives,
                                 const char *negatives,
                                 uint32_t max_size,
                                 uint64_t step_cap,
                                 bool keep,
                                 char **out);

/**
 * Number of programs kept in the background so far.
 *
 * # Safety
 * `session` must be a live handle and `out` a writable pointer.
 */
enum MilStatus mil_session_learned(const struct MilSession *session, size_t *out);

/**
 * # Safety
 * `session` must be null or a handle from this library, not yet freed.
 */
void mil_session_free(struct MilSession *session);

/**
 * Size of the hypothesis space as a decimal string.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum MilStatus mil_hspace_size(uint64_t m, uint64_t p, uint32_t j, uint32_t n, char **out);

/**
 * # Safety
 * `out` must be a writable pointer.
 */
enum MilStatus mil_sample_complexity(uint64_t m,
                                     uint64_t p,
                                     uint32_t j,
                                     uint32_t n,
                                     double eps,
                                     double delta,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MIL_H */
