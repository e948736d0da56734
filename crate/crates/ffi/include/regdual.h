#ifndef REGDUAL_H
#define REGDUAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RdStatus {
  RD_STATUS_OK = 0,
  RD_STATUS_NULL_POINTER = 1,
  RD_STATUS_INVALID_UTF8 = 2,
  RD_STATUS_PARSE = 3,
  RD_STATUS_CAP_EXCEEDED = 4,
  RD_STATUS_CHECK_FAILED = 5,
  RD_STATUS_OTHER = 6,
} RdStatus;

/**
 * Opaque regular language.
 */
typedef struct RdLanguage RdLanguage;

/**
 * Opaque nondeterministic automaton.
 */
typedef struct RdNfa RdNfa;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty if none. Valid until
 * the next failing call on the same thread.
 */
const char *rd_last_error(void);

/**
 * Parses a regex (`+` union, `*` star, `%` empty word, `#` empty set).
 *
 * # Safety
 * `regex` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RdStatus rd_language_parse(const char *regex, struct RdLanguage **out);

/**
 * # Safety
 * `l` must come from this library and not be used afterwards. Null is ignored.
 */
void rd_language_free(struct RdLanguage *l);

/**
 * Number of states of the minimal complete dfa; 0 on a null handle.
 *
 * # Safety
 * `l` must be null or a live handle.
 */
size_t rd_language_num_states(const struct RdLanguage *l);

/**
 * Writes 1 to `accepted` if the word is in the language, 0 otherwise.
 *
 * # Safety
 * `l` must be a live handle, `word` a NUL-terminated string and
 * `accepted` a valid pointer.
 */
enum RdStatus rd_language_accepts(const struct RdLanguage *l, const char *word, int32_t *accepted);

/**
 * A state-minimal nfa for the language, searching covers of at most
 * `grid_cap` grids.
 *
 * # Safety
 * `l` must be a live handle and `out` a valid pointer.
 */
enum RdStatus rd_min_nfa(const struct RdLanguage *l, size_t grid_cap, struct RdNfa **out);

/**
 * Reads an nfa from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RdStatus rd_nfa_from_json(const char *json, struct RdNfa **out);

/**
 * # Safety
 * `n` must be null or a live handle.
 */
size_t rd_nfa_num_states(const struct RdNfa *n);

/**
 * The language accepted by the automaton, as a new handle.
 *
 * # Safety
 * `n` must be a live handle and `out` a valid pointer.
 */
enum RdStatus rd_nfa_language(const struct RdNfa *n, struct RdLanguage **out);

/**
 * JSON form of the automaton; release with `rd_string_free`. Null on a
 * null handle.
 *
 * # Safety
 * `n` must be null or a live handle.
 */
char *rd_nfa_to_json(const struct RdNfa *n);

/**
 * # Safety
 * `n` must come from this library and not be used afterwards. Null is ignored.
 */
void rd_nfa_free(struct RdNfa *n);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is ignored.
 */
void rd_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REGDUAL_H */
