#ifndef FASCLIQUE_H
#define FASCLIQUE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FcStatus {
  FC_STATUS_OK = 0,
  FC_STATUS_NULL_POINTER = 1,
  FC_STATUS_PARAMETER = 2,
  FC_STATUS_PRECONDITION = 3,
  FC_STATUS_PARSE = 4,
  FC_STATUS_STRUCTURAL = 5,
  FC_STATUS_STAGE_FAILURE = 6,
  FC_STATUS_RESOURCE = 7,
  FC_STATUS_IO = 8,
  FC_STATUS_PANIC = 9,
} FcStatus;

/**
 * Opaque packing result handle.
 */
typedef struct FcPackingResult FcPackingResult;

/**
 * Opaque tournament handle.
 */
typedef struct FcTournament FcTournament;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *fc_last_error(void);

/**
 * Samples a uniformly random tournament with `k` parts of size `n`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum FcStatus fc_tournament_random(size_t n, size_t k, uint64_t seed, struct FcTournament **out);

/**
 * Parses a tournament from `.kpt` bytes.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be writable.
 */
enum FcStatus fc_tournament_from_kpt(const uint8_t *data, size_t len, struct FcTournament **out);

/**
 * Serializes to `.kpt`. The buffer is released with [`fc_bytes_free`].
 *
 * # Safety
 * `t` must be a live handle; `out_data` and `out_len` must be writable.
 */
enum FcStatus fc_tournament_to_kpt(const struct FcTournament *t,
                                   uint8_t **out_data,
                                   size_t *out_len);

/**
 * # Safety
 * `data` and `len` must come from one [`fc_tournament_to_kpt`] call.
 */
void fc_bytes_free(uint8_t *data, size_t len);

/**
 * Number of parts, or 0 for a null handle.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
size_t fc_tournament_k(const struct FcTournament *t);

/**
 * Total vertex count, or 0 for a null handle.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
size_t fc_tournament_num_vertices(const struct FcTournament *t);

/**
 * 1 if `u -> v`, 0 if not, -1 for a null handle or out-of-range vertex.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
int fc_tournament_has_edge(const struct FcTournament *t, size_t u, size_t v);

/**
 * # Safety
 * `t` must be null or a handle not yet freed.
 */
void fc_tournament_free(struct FcTournament *t);

/**
 * Runs the packing pipeline. `order` may be null for a random order drawn
 * from `seed`; otherwise it holds `order_len` vertex ids. A stage failure
 * still returns `Ok` with a result whose status reports it.
 *
 * # Safety
 * `t` must be a live handle, `order` null or `order_len` readable ids,
 * `out` writable.
 */
enum FcStatus fc_pack(const struct FcTournament *t,
                      const size_t *order,
                      size_t order_len,
                      bool practical,
                      uint64_t seed,
                      size_t retries,
                      struct FcPackingResult **out);

/**
 * 1 on success, 0 on stage failure, -1 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
int fc_packing_is_success(const struct FcPackingResult *r);

/**
 * # Safety
 * `r` must be null or a live handle.
 */
size_t fc_packing_num_cliques(const struct FcPackingResult *r);

/**
 * Copies clique `i` (k vertex ids) into `out`.
 *
 * # Safety
 * `r` must be a live handle and `out` must have room for k ids.
 */
enum FcStatus fc_packing_clique(const struct FcPackingResult *r, size_t i, size_t *out);

/**
 * The full result as JSON. Release with [`fc_string_free`].
 *
 * # Safety
 * `r` must be null or a live handle.
 */
char *fc_packing_to_json(const struct FcPackingResult *r);

/**
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void fc_packing_free(struct FcPackingResult *r);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void fc_string_free(char *s);

/**
 * Smallest integer d satisfying the constant inequalities for `k`.
 *
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_smallest_d(size_t k, uint64_t *out);

/**
 * Exact f_k of a tiny tournament (at most 8 vertices).
 *
 * # Safety
 * `t` must be a live handle and `out` writable.
 */
enum FcStatus fc_brute_force_fk(const struct FcTournament *t, size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FASCLIQUE_H */
