#ifndef QCLAB_H
#define QCLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum {
  QclabStatus_Ok = 0,
  QclabStatus_NullArgument = 1,
  QclabStatus_InvalidUtf8 = 2,
  QclabStatus_ParseError = 3,
  QclabStatus_InvalidSpec = 4,
  QclabStatus_WordError = 5,
  QclabStatus_BudgetExceeded = 6,
  QclabStatus_InternalError = 7,
} QclabStatus;

/**
 * Opaque model handle.
 */
typedef struct QclabModel QclabModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version string; static storage, do not free.
 */
const char *qclab_version(void);

/**
 * Message of the most recent error on this thread; borrowed, do not free.
 */
const char *qclab_last_error_message(void);

/**
 * Parses and validates a manifold spec; on success writes a handle that
 * must be released with `qclab_model_free`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
QclabStatus qclab_model_load_json(const char *json, QclabModel **out);

/**
 * Releases a model handle. Null is ignored.
 *
 * # Safety
 * `model` must come from `qclab_model_load_json` and not be freed twice.
 */
void qclab_model_free(QclabModel *model);

/**
 * Number of pieces in the model, or -1 on a null handle.
 *
 * # Safety
 * `model` must be a live handle.
 */
int qclab_model_piece_count(const QclabModel *model);

/**
 * Minimum positive wall separation within the exploration radius.
 *
 * # Safety
 * `model` and `out` must be valid.
 */
QclabStatus qclab_wall_gap(const QclabModel *model, int radius, double *out);

/**
 * Dual-tree translation length of a word literal
 * (e.g. "t0 ; v1: a ; t0^-1 ; v0: b").
 *
 * # Safety
 * All pointers must be valid.
 */
QclabStatus qclab_translation_length(const QclabModel *model, const char *word, int64_t *out);

/**
 * Morse test of a nontrivial word: writes 1 or 0.
 *
 * # Safety
 * All pointers must be valid.
 */
QclabStatus qclab_is_morse(const QclabModel *model, const char *word, int *out);

/**
 * Discretized distance between the deck translates g . x0 and h . x0 of
 * the root basepoint, for loop-word literals g and h.
 *
 * # Safety
 * All pointers must be valid.
 */
QclabStatus qclab_orbit_distance(const QclabModel *model,
                                 const char *word_g,
                                 const char *word_h,
                                 double resolution,
                                 double *out);

/**
 * Full analysis of Z^k x| Z for a row-major matrix literal like "2 1 1 1";
 * writes a JSON report string to be released with `qclab_string_free`.
 *
 * # Safety
 * All pointers must be valid.
 */
QclabStatus qclab_abc_analyze_json(const char *matrix, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void qclab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCLAB_H */
