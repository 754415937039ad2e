/* Generated by cbindgen from guarded-ffi; do not edit. */

#ifndef GUARDED_SATURATE_H
#define GUARDED_SATURATE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum GsStatus {
  GS_STATUS_OK = 0,
  /**
   * A null pointer or a string that is not UTF-8.
   */
  GS_STATUS_INVALID_ARGUMENT = 1,
  GS_STATUS_PARSE = 2,
  /**
   * The input is outside the supported fragments.
   */
  GS_STATUS_UNSUPPORTED = 3,
  /**
   * The step budget ran out before saturation finished.
   */
  GS_STATUS_BUDGET = 4,
  /**
   * Rewriting found the query entailed by the rules alone.
   */
  GS_STATUS_ENTAILED = 5,
  /**
   * The saturation could not be rewritten.
   */
  GS_STATUS_REWRITE = 6,
  /**
   * An internal error; the library state is unchanged.
   */
  GS_STATUS_INTERNAL = 7,
} GsStatus;

typedef enum GsVerdict {
  GS_VERDICT_NO = 0,
  GS_VERDICT_YES = 1,
} GsVerdict;

/**
 * A parsed problem. Opaque to C.
 */
typedef struct GsProblem GsProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next call on the same thread.
 */
const char *gs_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gs_version(void);

/**
 * Parses problem text. On success `*out` owns a new problem.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GsStatus gs_problem_parse(const char *src, struct GsProblem **out);

/**
 * Releases a problem. Null is ignored.
 *
 * # Safety
 * `p` must come from [`gs_problem_parse`] and not be used afterwards.
 */
void gs_problem_free(struct GsProblem *p);

/**
 * Decides whether the problem's rules and facts entail its queries.
 * `max_steps` of zero uses the default budget.
 *
 * # Safety
 * `p` must be a live problem and `out` a valid pointer.
 */
enum GsStatus gs_answer(const struct GsProblem *p,
                        uint64_t max_steps,
                        uint64_t seed,
                        enum GsVerdict *out);

/**
 * Rewrites the problem's rules and queries, ignoring its facts. On
 * success `*formula` holds the `formula: ... .` statement and `*hash`
 * its SHA-256 in hex; release both with [`gs_string_free`]. Either
 * output pointer may be null if not wanted.
 *
 * # Safety
 * `p` must be a live problem; non-null outputs must be valid pointers.
 */
enum GsStatus gs_rewrite(const struct GsProblem *p,
                         uint64_t max_steps,
                         char **formula,
                         char **hash);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void gs_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GUARDED_SATURATE_H */
