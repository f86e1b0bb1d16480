#ifndef M1TAUT_H
#define M1TAUT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum M1tautStatus {
  M1TAUT_STATUS_OK = 0,
  M1TAUT_STATUS_NULL_POINTER = 1,
  M1TAUT_STATUS_INVALID_ARGUMENT = 2,
  M1TAUT_STATUS_PARSE = 3,
  M1TAUT_STATUS_INFEASIBLE = 4,
  M1TAUT_STATUS_BUFFER_TOO_SMALL = 5,
  M1TAUT_STATUS_INTERNAL = 6,
} M1tautStatus;

// A computed page of the Cohen-Taylor spectral sequence.
typedef struct M1tautCtPage M1tautCtPage;

// A validated genus-one stable graph.
typedef struct M1tautGraph M1tautGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or NULL. Owned by the library;
// valid until the next call on the same thread.
const char *m1taut_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *m1taut_version(void);

// Frees a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void m1taut_string_free(char *s);

// Even Betti numbers for `n` points. Writes `n + 1` values into `out`;
// `len` receives the required length even when `capacity` is too small.
//
// # Safety
// `out` must hold `capacity` values; `len` must be valid for writing.
enum M1tautStatus m1taut_even_betti(size_t n,
                                    bool with_relation_data,
                                    size_t *out,
                                    size_t capacity,
                                    size_t *len);

// All stable graphs with `n` legs and `codim` edges as a JSON array.
//
// # Safety
// `out` must be valid for writing; free the result with [`m1taut_string_free`].
enum M1tautStatus m1taut_graphs_json(size_t n, size_t codim, char **out);

// Computes page 2 or 3 for `n` points.
//
// # Safety
// `out` must be valid for writing; release with [`m1taut_ct_page_free`].
enum M1tautStatus m1taut_ct_page_new(size_t n, uint8_t page, struct M1tautCtPage **out);

// Dimension and SL2-invariant count of entry `(p, q)`.
//
// # Safety
// `page` must be a live handle; `dim` and `invariants` valid for writing.
enum M1tautStatus m1taut_ct_page_entry(const struct M1tautCtPage *page,
                                       size_t p,
                                       size_t q,
                                       uint64_t *dim,
                                       uint64_t *invariants);

// The page as pretty-printed JSON, identical to the command-line dump.
//
// # Safety
// `page` must be a live handle; `out` valid for writing.
enum M1tautStatus m1taut_ct_page_to_json(const struct M1tautCtPage *page, char **out);

// Releases a page handle. NULL is ignored.
//
// # Safety
// `page` must come from [`m1taut_ct_page_new`] and not have been freed.
void m1taut_ct_page_free(struct M1tautCtPage *page);

// Parses and validates a graph in either JSON layout.
//
// # Safety
// `json` must be a NUL-terminated string; `out` valid for writing.
enum M1tautStatus m1taut_graph_from_json(const char *json, struct M1tautGraph **out);

// Order of the automorphism group.
//
// # Safety
// `graph` must be a live handle; `count` valid for writing.
enum M1tautStatus m1taut_graph_automorphism_count(const struct M1tautGraph *graph, uint64_t *count);

// Copies the canonical key into `buf`. Two graphs are isomorphic exactly
// when their keys are equal. `len` receives the key length even when
// `capacity` is too small.
//
// # Safety
// `graph` must be a live handle; `buf` must hold `capacity` bytes.
enum M1tautStatus m1taut_graph_canonical_key(const struct M1tautGraph *graph,
                                             uint8_t *buf,
                                             size_t capacity,
                                             size_t *len);

// The graph in vertex-list JSON.
//
// # Safety
// `graph` must be a live handle; `out` valid for writing.
enum M1tautStatus m1taut_graph_to_json(const struct M1tautGraph *graph, char **out);

// Releases a graph handle. NULL is ignored.
//
// # Safety
// `graph` must come from [`m1taut_graph_from_json`] and not have been freed.
void m1taut_graph_free(struct M1tautGraph *graph);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* M1TAUT_H */
