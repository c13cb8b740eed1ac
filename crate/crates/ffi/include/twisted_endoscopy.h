#ifndef TWISTED_ENDOSCOPY_H
#define TWISTED_ENDOSCOPY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status codes returned by every fallible entry point.
typedef enum TeStatus {
  TE_STATUS_OK = 0,
  // A literal or argument string is malformed.
  TE_STATUS_PARSE = 1,
  // Well-formed input violating a mathematical precondition.
  TE_STATUS_INVALID = 2,
  // A brute-force oracle did not stabilize.
  TE_STATUS_INCONCLUSIVE = 3,
  // A required pointer argument was null.
  TE_STATUS_NULL_POINTER = 4,
  // A string argument was not valid UTF-8.
  TE_STATUS_UTF8 = 5,
  // A random search exhausted its retry budget.
  TE_STATUS_RETRY_EXHAUSTED = 6,
  // The library panicked; this is a bug.
  TE_STATUS_PANIC = 7,
} TeStatus;

// Opaque orthogonal or symplectic configuration `(V, q; X, Y)`.
typedef struct TeConfig TeConfig;

// Opaque quadratic form.
typedef struct TeForm TeForm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *te_version(void);

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next call into the library on the same thread.
const char *te_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string obtained from this library, not yet freed.
void te_string_free(char *s);

// Hilbert symbol `(a, b)_p` of two rationals given as `"num/den"`.
//
// # Safety
// `a` and `b` must be NUL-terminated strings; `out` must be writable.
enum TeStatus te_hilbert_qp(const char *a, const char *b, uint64_t p, int8_t *out);

// Canonical square-class representative of a nonzero rational, as a new
// string.
//
// # Safety
// `a` must be a NUL-terminated string; `out` must be writable.
enum TeStatus te_square_class(const char *a, uint64_t p, char **out);

// Parses a form literal `{"p", "diag" | "gram", "label"?}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum TeStatus te_form_parse(const char *json, struct TeForm **out);

// # Safety
// `form` must be null or a handle from [`te_form_parse`], not yet freed.
void te_form_free(struct TeForm *form);

// Dimension of a form; 0 for a null handle.
//
// # Safety
// `form` must be null or a live handle.
size_t te_form_dim(const struct TeForm *form);

// Invariants (dimension, determinant, discriminant, Hasse invariant, Witt
// index, isotropy) as a JSON document.
//
// # Safety
// `form` must be a live handle; `out` must be writable.
enum TeStatus te_form_invariants(const struct TeForm *form, char **out);

// Weil index `γ_ψ(q) = ζ₈^k`; writes `k ∈ [0, 8)`.
//
// # Safety
// `form` must be a live handle; `out` must be writable.
enum TeStatus te_form_weil_index(const struct TeForm *form, uint8_t *out);

// Whether two forms over the same ℚ_p are isometric.
//
// # Safety
// Both handles must be live; `out` must be writable.
enum TeStatus te_form_equivalent(const struct TeForm *a, const struct TeForm *b, bool *out);

// Parses a configuration literal `{"ambient", "X", "Y"}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum TeStatus te_config_parse(const char *json, struct TeConfig **out);

// Seeded random configuration over an ambient literal
// `{"qV": form, "epsilon": ±1}`.
//
// # Safety
// `ambient_json` must be a NUL-terminated string; `out` must be writable.
enum TeStatus te_config_random(const char *ambient_json, uint64_t seed, struct TeConfig **out);

// # Safety
// `config` must be null or a handle from this library, not yet freed.
void te_config_free(struct TeConfig *config);

// The configuration as a literal.
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum TeStatus te_config_to_json(const struct TeConfig *config, char **out);

// Both sides of the constancy check on a configuration of rank `n`.
// `lhs` receives `-1` when the configuration is off the closure variety.
//
// # Safety
// `config` must be a live handle; all out-pointers must be writable.
enum TeStatus te_gs_constancy(const struct TeConfig *config,
                              size_t n,
                              int32_t *lhs,
                              uint8_t *rhs,
                              bool *pass);

// Runs one command line of the `twendo` tool. `argv` holds `argc` strings
// without the program name; `stdin_text` may be null. Returns the exit
// status (0 pass, 1 check failure, 2 usage, 3 inconclusive) or `-1` if the
// arguments themselves are unusable. Output documents are written to
// `out_stdout` and `out_stderr` when those are non-null.
//
// # Safety
// `argv` must point to `argc` NUL-terminated strings.
int32_t te_cli_run(size_t argc,
                   const char *const *argv,
                   const char *stdin_text,
                   char **out_stdout,
                   char **out_stderr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWISTED_ENDOSCOPY_H */
