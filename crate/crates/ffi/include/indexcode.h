#ifndef INDEXCODE_H
#define INDEXCODE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IxSelection {
  // The instance's own selection block.
  IX_SELECTION_PAPER = 0,
  // Union over every admissible selection.
  IX_SELECTION_ALL = 1,
} IxSelection;

// Result of every fallible entry point.
typedef enum IxStatus {
  IX_STATUS_OK = 0,
  // A required pointer argument was null.
  IX_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not UTF-8.
  IX_STATUS_INVALID_UTF8 = 2,
  // Malformed or invalid input: instance text, names, vectors, options.
  IX_STATUS_INVALID_INPUT = 3,
  // The request exceeds a resource cap, such as the selection count.
  IX_STATUS_RESOURCE_CAP = 4,
  // An internal panic was caught at the boundary.
  IX_STATUS_INTERNAL = 5,
} IxStatus;

// Opaque parsed instance.
typedef struct IxInstance IxInstance;

// Opaque computed region together with its instance.
typedef struct IxRegion IxRegion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread; empty if none. The
// pointer stays valid until the next failing call on the same thread.
const char *ix_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void ix_string_free(char *s);

// Parses an instance document (JSON text).
//
// # Safety
// `json` must be a nul-terminated string and `out` writable.
enum IxStatus ix_instance_from_json(const char *json, struct IxInstance **out);

// Loads a bundled example by name, such as `dist-14-123`.
//
// # Safety
// `name` must be a nul-terminated string and `out` writable.
enum IxStatus ix_instance_builtin(const char *name, struct IxInstance **out);

// Number of messages of the instance, 0 for a null handle.
//
// # Safety
// `instance` must be null or a live handle.
size_t ix_instance_message_count(const struct IxInstance *instance);

// # Safety
// `instance` must be null or a live handle, not used afterwards.
void ix_instance_free(struct IxInstance *instance);

// Computes the achievable region. `precision_bits` sets the dyadic floor of
// the MAC information values (1 to 64; 24 is the CLI default). `workers` of
// 0 uses the default thread pool.
//
// # Safety
// `instance` must be a live handle and `out` writable.
enum IxStatus ix_region_compute(const struct IxInstance *instance,
                                enum IxSelection selection,
                                uint32_t precision_bits,
                                size_t workers,
                                struct IxRegion **out);

// Number of polyhedra in the union, 0 for a null handle.
//
// # Safety
// `region` must be null or a live handle.
size_t ix_region_polyhedron_count(const struct IxRegion *region);

// Canonical inequalities of one polyhedron, one per line, bounds exact.
//
// # Safety
// `region` must be a live handle and `out` writable.
enum IxStatus ix_region_render(const struct IxRegion *region, size_t index, char **out);

// Largest weighted sum-rate. `weights` is `w1,...,wN` with one nonnegative
// rational per message; the exact value is written as a string like `5/2`.
//
// # Safety
// `region` must be a live handle, `weights` nul-terminated and `out` writable.
enum IxStatus ix_region_max_weighted_rate(const struct IxRegion *region,
                                          const char *weights,
                                          char **out);

// Whether the rate point `r1,...,rN` lies in the region.
//
// # Safety
// `region` must be a live handle, `rates` nul-terminated and `out` writable.
enum IxStatus ix_region_contains(const struct IxRegion *region, const char *rates, bool *out);

// # Safety
// `region` must be null or a live handle, not used afterwards.
void ix_region_free(struct IxRegion *region);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* INDEXCODE_H */
