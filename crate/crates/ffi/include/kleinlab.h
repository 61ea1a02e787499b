/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef KLEINLAB_H
#define KLEINLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success.
typedef enum KlStatus {
  KL_STATUS_OK = 0,
  KL_STATUS_NULL_POINTER = 1,
  KL_STATUS_INVALID_UTF8 = 2,
  // A word could not be parsed or is too long.
  KL_STATUS_WORD_PARSE = 3,
  // A parameter is outside its domain, or a buffer is too small.
  KL_STATUS_OUT_OF_RANGE = 4,
  // A geometric construction or certificate failed.
  KL_STATUS_GEOMETRY = 5,
  // A word is not a vertex of the embedded ball.
  KL_STATUS_NOT_FOUND = 6,
  KL_STATUS_IO = 7,
  KL_STATUS_PANIC = 8,
} KlStatus;

// A factored tree ball. Opaque to C.
typedef struct KlEmbedding KlEmbedding;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static string.
const char *kl_version(void);

// Message of the last failed call on this thread, or null. Valid until the
// next call into the library from the same thread.
const char *kl_last_error_message(void);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` is null or came from this library and has not been freed.
void kl_string_free(char *s);

// Embeds the tree ball of `radius` with `cosh d = lambda^{tree distance}`.
//
// # Safety
// `out` is null or valid for writes.
enum KlStatus kl_embedding_new(double lambda, size_t radius, struct KlEmbedding **out);

// # Safety
// `e` is null or came from [`kl_embedding_new`] and has not been freed.
void kl_embedding_free(struct KlEmbedding *e);

// Number of embedded vertices; 0 for null.
//
// # Safety
// `e` is null or a live embedding.
size_t kl_embedding_len(const struct KlEmbedding *e);

// Coordinates per point (hyperbolic dimension plus one); 0 for null.
//
// # Safety
// `e` is null or a live embedding.
size_t kl_embedding_coords(const struct KlEmbedding *e);

// Largest relative error of the realized Gram matrix; NaN for null.
//
// # Safety
// `e` is null or a live embedding.
double kl_embedding_residual(const struct KlEmbedding *e);

// Copies the hyperboloid coordinates of vertex `word` into `buf`, which
// must hold [`kl_embedding_coords`] doubles.
//
// # Safety
// `e` is null or live; `word` is null or NUL-terminated; `buf` is null or
// valid for `len` writes.
enum KlStatus kl_embedding_point(const struct KlEmbedding *e,
                                 const char *word,
                                 double *buf,
                                 size_t len);

// Hyperbolic distance between the images of two vertices.
//
// # Safety
// Pointers are null or valid; strings are NUL-terminated.
enum KlStatus kl_embedding_distance(const struct KlEmbedding *e,
                                    const char *u,
                                    const char *v,
                                    double *out);

// `γ(word)` as a newly allocated string; free it with [`kl_string_free`].
//
// # Safety
// `word` is null or NUL-terminated; `out` is null or valid for writes.
enum KlStatus kl_gamma(const char *word, char **out);

// Distance between two vertices of the Cayley tree.
//
// # Safety
// Strings are null or NUL-terminated; `out` is null or valid for writes.
enum KlStatus kl_tree_dist(const char *u, const char *v, size_t *out);

// Runs a scenario with default parameters and returns its JSON report.
// `name` is `nonrigidity`, `h4` or `normal-subgroup`; `passed` (optional)
// receives the overall verdict as 0 or 1.
//
// # Safety
// `name` is null or NUL-terminated; `out` is null or valid for writes;
// `passed` is null or valid for writes.
enum KlStatus kl_scenario_json(const char *name, uint64_t seed, char **out, int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KLEINLAB_H */
