#ifndef SURFNAV_H
#define SURFNAV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum SnStatus {
  SN_STATUS_OK = 0,
  SN_STATUS_NULL_POINTER = 1,
  SN_STATUS_INVALID_ARGUMENT = 2,
  SN_STATUS_FILE_NOT_FOUND = 3,
  SN_STATUS_IO = 4,
  SN_STATUS_FORMAT = 5,
  SN_STATUS_UNKNOWN_PRESET = 6,
  SN_STATUS_NO_CANDIDATES = 7,
  SN_STATUS_SEED_SNAP_FAILED = 8,
  SN_STATUS_NOT_ON_SURFACE = 9,
  SN_STATUS_UNREACHABLE = 10,
  SN_STATUS_PANIC = 255,
} SnStatus;

/**
 * Occupancy grid handle.
 */
typedef struct SnGrid SnGrid;

/**
 * Planned path.
 */
typedef struct SnPath SnPath;

/**
 * Extracted surface with its boundary distance field.
 */
typedef struct SnSurface SnSurface;

typedef struct SnExtractionParams {
  /**
   * Largest climbable step, meters.
   */
  double t_conn;
  /**
   * Robot height, meters.
   */
  double h_clear;
  /**
   * Robot radius, meters.
   */
  double r_inf;
} SnExtractionParams;

typedef struct SnPlanParams {
  double epsilon;
  double w_up;
  double w_down;
  double w_obs;
} SnPlanParams;

typedef struct SnVoxel {
  int32_t x;
  int32_t y;
  int32_t z;
} SnVoxel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *sn_last_error_message(void);

struct SnExtractionParams sn_extraction_params_default(void);

struct SnPlanParams sn_plan_params_default(void);

/**
 * Loads a grid file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum SnStatus sn_grid_load(const char *path, struct SnGrid **out);

/**
 * Writes a grid file.
 *
 * # Safety
 * `grid` must come from this library; `path` must be NUL-terminated.
 */
enum SnStatus sn_grid_save(const struct SnGrid *grid, const char *path);

/**
 * Builds a preset scene at `resolution` meters.
 *
 * # Safety
 * `name` must be NUL-terminated; `out` must be writable.
 */
enum SnStatus sn_grid_from_preset(const char *name, double resolution, struct SnGrid **out);

/**
 * Grid size in voxels along x, y and z.
 *
 * # Safety
 * `grid` must come from this library; `dims` must hold three values.
 */
enum SnStatus sn_grid_dims(const struct SnGrid *grid, size_t *dims);

/**
 * Voxel edge length in meters, or NaN for a null handle.
 *
 * # Safety
 * `grid` must be null or come from this library.
 */
double sn_grid_resolution(const struct SnGrid *grid);

/**
 * Occupancy of a voxel; out-of-grid voxels read as occupied.
 *
 * # Safety
 * `grid` must come from this library; `occupied` must be writable.
 */
enum SnStatus sn_grid_is_occupied(const struct SnGrid *grid, struct SnVoxel v, bool *occupied);

/**
 * # Safety
 * `grid` must be null or come from this library, and not be used again.
 */
void sn_grid_free(struct SnGrid *grid);

/**
 * Extracts the surface reachable from the state nearest `pose` (three
 * doubles, meters). A null `params` means defaults.
 *
 * # Safety
 * Pointers must be valid as described; `out` must be writable.
 */
enum SnStatus sn_surface_extract(const struct SnGrid *grid,
                                 const double *pose,
                                 double max_snap,
                                 const struct SnExtractionParams *params,
                                 struct SnSurface **out);

/**
 * Number of surface states, or 0 for a null handle.
 *
 * # Safety
 * `surface` must be null or come from this library.
 */
size_t sn_surface_len(const struct SnSurface *surface);

/**
 * State `ordinal` in discovery order and its boundary distance.
 * `distance` may be null.
 *
 * # Safety
 * `surface` must come from this library; `out` must be writable.
 */
enum SnStatus sn_surface_state(const struct SnSurface *surface,
                               size_t ordinal,
                               struct SnVoxel *out,
                               uint32_t *distance);

/**
 * Heights of the states in column (x, y), ascending. Writes at most `cap`
 * values to `levels` and stores the full count in `count`.
 *
 * # Safety
 * `levels` must hold `cap` values (may be null when `cap` is 0); `count`
 * must be writable.
 */
enum SnStatus sn_surface_levels(const struct SnSurface *surface,
                                int32_t x,
                                int32_t y,
                                int32_t *levels,
                                size_t cap,
                                size_t *count);

/**
 * # Safety
 * `surface` must be null or come from this library, and not be used again.
 */
void sn_surface_free(struct SnSurface *surface);

/**
 * Plans between the states nearest `start` and `goal` (three doubles each,
 * meters). A null `params` means defaults.
 *
 * # Safety
 * Pointers must be valid as described; `out` must be writable.
 */
enum SnStatus sn_plan(const struct SnSurface *surface,
                      const double *start,
                      const double *goal,
                      double max_snap,
                      const struct SnPlanParams *params,
                      struct SnPath **out);

/**
 * Number of states on the path, or 0 for a null handle.
 *
 * # Safety
 * `path` must be null or come from this library.
 */
size_t sn_path_len(const struct SnPath *path);

/**
 * # Safety
 * `path` must come from this library; `out` must be writable.
 */
enum SnStatus sn_path_state(const struct SnPath *path, size_t index, struct SnVoxel *out);

/**
 * Total edge cost, or NaN for a null handle.
 *
 * # Safety
 * `path` must be null or come from this library.
 */
double sn_path_cost(const struct SnPath *path);

/**
 * Metric length in meters, or NaN for a null handle.
 *
 * # Safety
 * `path` must be null or come from this library.
 */
double sn_path_length(const struct SnPath *path);

/**
 * Nodes expanded by the search, or 0 for a null handle.
 *
 * # Safety
 * `path` must be null or come from this library.
 */
size_t sn_path_expanded(const struct SnPath *path);

/**
 * # Safety
 * `path` must be null or come from this library, and not be used again.
 */
void sn_path_free(struct SnPath *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SURFNAV_H */
