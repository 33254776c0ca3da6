//! C ABI over `surfnav`.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free`. Every fallible call returns an [`SnStatus`];
//! on failure [`sn_last_error_message`] describes the cause for the calling
//! thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use surfnav::scenegen::{build_scene, preset, PresetName};
use surfnav::{
    plan, run_extraction, snap_endpoint, DistanceField, Endpoint, Error, ExtractionParams, OccupancyGrid,
    PathResult, PlanParams, SeedSpec, Surface,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    FileNotFound = 3,
    Io = 4,
    Format = 5,
    UnknownPreset = 6,
    NoCandidates = 7,
    SeedSnapFailed = 8,
    NotOnSurface = 9,
    Unreachable = 10,
    Panic = 255,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SnVoxel {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnExtractionParams {
    /// Largest climbable step, meters.
    pub t_conn: f64,
    /// Robot height, meters.
    pub h_clear: f64,
    /// Robot radius, meters.
    pub r_inf: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnPlanParams {
    pub epsilon: f64,
    pub w_up: f64,
    pub w_down: f64,
    pub w_obs: f64,
}

/// Occupancy grid handle.
pub struct SnGrid {
    grid: OccupancyGrid,
}

/// Extracted surface with its boundary distance field.
pub struct SnSurface {
    surface: Surface,
    dfield: DistanceField,
}

/// Planned path.
pub struct SnPath {
    result: PathResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SnStatus {
    match e {
        Error::FileNotFound(_) => SnStatus::FileNotFound,
        Error::Io { .. } | Error::RawIo(_) => SnStatus::Io,
        Error::Format { .. } | Error::Parse { .. } | Error::Json(_) => SnStatus::Format,
        Error::UnknownPreset(_) => SnStatus::UnknownPreset,
        Error::NoCandidates => SnStatus::NoCandidates,
        Error::SeedSnapFailed { .. } | Error::InvalidSeed(_) => SnStatus::SeedSnapFailed,
        Error::NotOnSurface { .. } => SnStatus::NotOnSurface,
        Error::Unreachable { .. } => SnStatus::Unreachable,
        _ => SnStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Arg(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SnStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            SnStatus::NullPointer
        }
        Ok(Err(Failure::Arg(msg))) => {
            set_last_error(msg);
            SnStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            SnStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Arg(format!("{what} is not valid UTF-8")))
}

unsafe fn point(p: *const f64, what: &'static str) -> Result<[f64; 3], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok([*p, *p.add(1), *p.add(2)])
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn voxel(v: surfnav::Voxel) -> SnVoxel {
    SnVoxel { x: v.x, y: v.y, z: v.z }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn sn_extraction_params_default() -> SnExtractionParams {
    let p = ExtractionParams::default();
    SnExtractionParams {
        t_conn: p.t_conn,
        h_clear: p.h_clear,
        r_inf: p.r_inf,
    }
}

#[no_mangle]
pub extern "C" fn sn_plan_params_default() -> SnPlanParams {
    let p = PlanParams::default();
    SnPlanParams {
        epsilon: p.epsilon,
        w_up: p.w_up,
        w_down: p.w_down,
        w_obs: p.w_obs,
    }
}

/// Loads a grid file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn_grid_load(path: *const c_char, out: *mut *mut SnGrid) -> SnStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let grid = OccupancyGrid::load(c_str(path, "path")?)?;
        write_out(out, SnGrid { grid })
    })
}

/// Writes a grid file.
///
/// # Safety
/// `grid` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn sn_grid_save(grid: *const SnGrid, path: *const c_char) -> SnStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        g.grid.save(c_str(path, "path")?)?;
        Ok(())
    })
}

/// Builds a preset scene at `resolution` meters.
///
/// # Safety
/// `name` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn_grid_from_preset(name: *const c_char, resolution: f64, out: *mut *mut SnGrid) -> SnStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let name: PresetName = c_str(name, "name")?.parse()?;
        let scene = build_scene(&preset(name, resolution)?)?;
        write_out(out, SnGrid { grid: scene.grid })
    })
}

/// Grid size in voxels along x, y and z.
///
/// # Safety
/// `grid` must come from this library; `dims` must hold three values.
#[no_mangle]
pub unsafe extern "C" fn sn_grid_dims(grid: *const SnGrid, dims: *mut usize) -> SnStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        if dims.is_null() {
            return Err(Failure::Null("dims"));
        }
        let d = g.grid.dims();
        *dims = d.nx;
        *dims.add(1) = d.ny;
        *dims.add(2) = d.nz;
        Ok(())
    })
}

/// Voxel edge length in meters, or NaN for a null handle.
///
/// # Safety
/// `grid` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn sn_grid_resolution(grid: *const SnGrid) -> f64 {
    grid.as_ref().map_or(f64::NAN, |g| g.grid.resolution())
}

/// Occupancy of a voxel; out-of-grid voxels read as occupied.
///
/// # Safety
/// `grid` must come from this library; `occupied` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn_grid_is_occupied(grid: *const SnGrid, v: SnVoxel, occupied: *mut bool) -> SnStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        if occupied.is_null() {
            return Err(Failure::Null("occupied"));
        }
        *occupied = g.grid.is_occupied(surfnav::Voxel::new(v.x, v.y, v.z));
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or come from this library, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn sn_grid_free(grid: *mut SnGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Extracts the surface reachable from the state nearest `pose` (three
/// doubles, meters). A null `params` means defaults.
///
/// # Safety
/// Pointers must be valid as described; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn_surface_extract(
    grid: *const SnGrid,
    pose: *const f64,
    max_snap: f64,
    params: *const SnExtractionParams,
    out: *mut *mut SnSurface,
) -> SnStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let p = params.as_ref().copied().unwrap_or_else(|| sn_extraction_params_default());
        let params = ExtractionParams {
            t_conn: p.t_conn,
            h_clear: p.h_clear,
            r_inf: p.r_inf,
        };
        let seed = SeedSpec::Pose {
            position: point(pose, "pose")?,
            max_snap,
        };
        let ex = run_extraction(&g.grid, &params, &seed)?;
        write_out(
            out,
            SnSurface {
                surface: ex.surface,
                dfield: ex.dfield,
            },
        )
    })
}

/// Number of surface states, or 0 for a null handle.
///
/// # Safety
/// `surface` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn sn_surface_len(surface: *const SnSurface) -> usize {
    surface.as_ref().map_or(0, |s| s.surface.len())
}

/// State `ordinal` in discovery order and its boundary distance.
/// `distance` may be null.
///
/// # Safety
/// `surface` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn_surface_state(
    surface: *const SnSurface,
    ordinal: usize,
    out: *mut SnVoxel,
    distance: *mut u32,
) -> SnStatus {
    guard(|| {
        let s = deref(surface, "surface")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        if ordinal >= s.surface.len() {
            return Err(Failure::Arg(format!("ordinal {ordinal} out of range {}", s.surface.len())));
        }
        let o = ordinal as u32;
        *out = voxel(s.surface.state(o));
        if !distance.is_null() {
            *distance = s.dfield.get(o);
        }
        Ok(())
    })
}

/// Heights of the states in column (x, y), ascending. Writes at most `cap`
/// values to `levels` and stores the full count in `count`.
///
/// # Safety
/// `levels` must hold `cap` values (may be null when `cap` is 0); `count`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn_surface_levels(
    surface: *const SnSurface,
    x: i32,
    y: i32,
    levels: *mut i32,
    cap: usize,
    count: *mut usize,
) -> SnStatus {
    guard(|| {
        let s = deref(surface, "surface")?;
        if count.is_null() {
            return Err(Failure::Null("count"));
        }
        let zs = s.surface.levels_at(x, y);
        if cap > 0 && levels.is_null() {
            return Err(Failure::Null("levels"));
        }
        for (i, z) in zs.iter().take(cap).enumerate() {
            *levels.add(i) = *z;
        }
        *count = zs.len();
        Ok(())
    })
}

/// # Safety
/// `surface` must be null or come from this library, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn sn_surface_free(surface: *mut SnSurface) {
    if !surface.is_null() {
        drop(Box::from_raw(surface));
    }
}

/// Plans between the states nearest `start` and `goal` (three doubles each,
/// meters). A null `params` means defaults.
///
/// # Safety
/// Pointers must be valid as described; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn_plan(
    surface: *const SnSurface,
    start: *const f64,
    goal: *const f64,
    max_snap: f64,
    params: *const SnPlanParams,
    out: *mut *mut SnPath,
) -> SnStatus {
    guard(|| {
        let s = deref(surface, "surface")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let p = params.as_ref().copied().unwrap_or_else(|| sn_plan_params_default());
        let params = PlanParams {
            epsilon: p.epsilon,
            w_up: p.w_up,
            w_down: p.w_down,
            w_obs: p.w_obs,
        };
        let a = snap_endpoint(&s.surface, point(start, "start")?, max_snap, Endpoint::Start)?;
        let b = snap_endpoint(&s.surface, point(goal, "goal")?, max_snap, Endpoint::Goal)?;
        let result = plan(&s.surface, &s.dfield, s.surface.state(a), s.surface.state(b), &params)?;
        write_out(out, SnPath { result })
    })
}

/// Number of states on the path, or 0 for a null handle.
///
/// # Safety
/// `path` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn sn_path_len(path: *const SnPath) -> usize {
    path.as_ref().map_or(0, |p| p.result.states.len())
}

/// # Safety
/// `path` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn_path_state(path: *const SnPath, index: usize, out: *mut SnVoxel) -> SnStatus {
    guard(|| {
        let p = deref(path, "path")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let v = p
            .result
            .states
            .get(index)
            .ok_or_else(|| Failure::Arg(format!("index {index} out of range {}", p.result.states.len())))?;
        *out = voxel(*v);
        Ok(())
    })
}

/// Total edge cost, or NaN for a null handle.
///
/// # Safety
/// `path` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn sn_path_cost(path: *const SnPath) -> f64 {
    path.as_ref().map_or(f64::NAN, |p| p.result.cost)
}

/// Metric length in meters, or NaN for a null handle.
///
/// # Safety
/// `path` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn sn_path_length(path: *const SnPath) -> f64 {
    path.as_ref().map_or(f64::NAN, |p| p.result.metric_length)
}

/// Nodes expanded by the search, or 0 for a null handle.
///
/// # Safety
/// `path` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn sn_path_expanded(path: *const SnPath) -> usize {
    path.as_ref().map_or(0, |p| p.result.expanded)
}

/// # Safety
/// `path` must be null or come from this library, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn sn_path_free(path: *mut SnPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}
