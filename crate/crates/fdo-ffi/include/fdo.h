#ifndef FDO_FFI_H
#define FDO_FFI_H

/* Generated by cbindgen from fdo-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the CLI exit codes, plus argument errors.
 */
typedef enum FdoStatus {
  FdoStatus_Ok = 0,
  FdoStatus_Validation = 1,
  FdoStatus_NotFound = 2,
  FdoStatus_MetricsViolation = 3,
  FdoStatus_InvalidArgument = 4,
} FdoStatus;

/**
 * Opaque registry-store handle.
 */
typedef struct FdoStore FdoStore;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread; borrowed, valid until the next
 * library call on the same thread. Never null.
 */
const char *fdo_last_error_message(void);

/**
 * Releases a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must have been returned by this library and not freed before.
 */
void fdo_string_free(char *s);

/**
 * Opens an existing store. Returns null on failure.
 *
 * # Safety
 * `root` must be a valid NUL-terminated path string.
 */
struct FdoStore *fdo_store_open(const char *root);

/**
 * Creates an empty store for the given model (`record`, `profile` or
 * `attribute`). Returns null on failure.
 *
 * # Safety
 * `root` and `model` must be valid NUL-terminated strings.
 */
struct FdoStore *fdo_store_create(const char *root, const char *model);

/**
 * Releases a store handle. Null is a no-op.
 *
 * # Safety
 * `handle` must have come from `fdo_store_open`/`fdo_store_create` and
 * must not be used afterwards.
 */
void fdo_store_close(struct FdoStore *handle);

/**
 * Writes the store's model name (`record`/`profile`/`attribute`) to `out`.
 *
 * # Safety
 * `handle` must be a live store handle; `out` must be a valid pointer.
 */
enum FdoStatus fdo_store_model(const struct FdoStore *handle, char **out);

/**
 * Newline-separated sorted PIDs of operations associated with `fdo`.
 *
 * # Safety
 * `handle` must be live; `fdo` a valid NUL-terminated string; `out` valid.
 */
enum FdoStatus fdo_query_ops_for(const struct FdoStore *handle, const char *fdo, char **out);

/**
 * Newline-separated sorted PIDs of FDOs associated with `op`.
 *
 * # Safety
 * `handle` must be live; `op` a valid NUL-terminated string; `out` valid.
 */
enum FdoStatus fdo_query_fdos_for(const struct FdoStore *handle, const char *op, char **out);

/**
 * Sets `*out` to 1 if the pair is associated, 0 otherwise.
 *
 * # Safety
 * `handle` must be live; `fdo`/`op` valid NUL-terminated strings; `out`
 * a valid pointer.
 */
enum FdoStatus fdo_query_check(const struct FdoStore *handle,
                               const char *fdo,
                               const char *op,
                               int32_t *out);

/**
 * Exports the association graph; `dot` selects DOT output, anything else
 * the tab-separated edge list.
 *
 * # Safety
 * `handle` must be live; `format` a valid NUL-terminated string; `out`
 * a valid pointer.
 */
enum FdoStatus fdo_graph_export(const struct FdoStore *handle, const char *format, char **out);

/**
 * Runs the metrics report and writes it as CSV. Returns
 * `MetricsViolation` (with the CSV still written) if any measure fails.
 *
 * # Safety
 * `handle` must be live; `out` a valid pointer.
 */
enum FdoStatus fdo_metrics_csv(const struct FdoStore *handle,
                               uint64_t seed,
                               uintptr_t sample,
                               char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FDO_FFI_H */
