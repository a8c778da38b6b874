//! C ABI for the plgcirmap library.
//!
//! Conventions:
//! - Maps are opaque handles created by `plg_map_compute` / `plg_map_from_json`
//!   and released with `plg_map_free`.
//! - Every fallible call returns a [`PlgStatus`]; on failure a human-readable
//!   message is available from `plg_last_error_message` until the next call
//!   on the same thread.
//! - Points are interleaved `x0, y0, x1, y1, …` double arrays.

use plgcirmap::error::Error;
use plgcirmap::geometry::domain_from_json;
use plgcirmap::mapdata::{ConformalMap, Normalization};
use plgcirmap::{compute_map, RunConfig, C64};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlgStatus {
    /// Success.
    Ok = 0,
    /// A pointer argument was null or an argument value was out of range.
    InvalidArgument = 1,
    /// The input domain violates the geometric preconditions.
    InvalidGeometry = 2,
    /// The iterative solver did not converge.
    NoConvergence = 3,
    /// I/O, encoding, or schema failure.
    IoError = 4,
    /// Internal panic; the library state is still valid.
    Internal = 5,
}

/// Solver configuration; obtain defaults from `plg_config_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PlgConfig {
    /// Nodes per polygon side (even, >= 4).
    pub n: usize,
    /// Corner-grading exponent (>= 2).
    pub grading_p: u32,
    pub gmres_tol: f64,
    pub gmres_maxit: usize,
    pub koebe_tol: f64,
    pub koebe_maxit: usize,
    /// 0 = automatic, 1..4 = the eq1..eq4 normalization conditions.
    pub normalization: u32,
    /// Trusted-evaluation margin; <= 0 selects the default.
    pub delta: f64,
}

/// Opaque handle to a computed conformal map.
pub struct PlgMap {
    inner: ConformalMap,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PlgStatus {
    match e {
        Error::Io(_)
        | Error::Json(_)
        | Error::Schema(_)
        | Error::VersionMismatch { .. }
        | Error::BadMeshSize { .. } => PlgStatus::IoError,
        Error::GmresNoConvergence { .. }
        | Error::KoebeNoConvergence { .. }
        | Error::KoebeSubStep { .. }
        | Error::NotConverged => PlgStatus::NoConvergence,
        _ => PlgStatus::InvalidGeometry,
    }
}

fn fail(e: &Error) -> PlgStatus {
    set_error(&e.to_string());
    status_of(e)
}

fn guarded(f: impl FnOnce() -> PlgStatus) -> PlgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            PlgStatus::Internal
        }
    }
}

/// Message describing the most recent failure on this thread.  The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn plg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Default solver configuration.
#[no_mangle]
pub extern "C" fn plg_config_default() -> PlgConfig {
    let d = RunConfig::default();
    PlgConfig {
        n: d.n,
        grading_p: d.grading_p,
        gmres_tol: d.gmres_tol,
        gmres_maxit: d.gmres_maxit,
        koebe_tol: d.koebe_tol,
        koebe_maxit: d.koebe_maxit,
        normalization: 0,
        delta: 0.0,
    }
}

fn run_config(cfg: &PlgConfig) -> Option<RunConfig> {
    let normalization = match cfg.normalization {
        0 => None,
        1 => Some(Normalization::Eq1),
        2 => Some(Normalization::Eq2),
        3 => Some(Normalization::Eq3),
        4 => Some(Normalization::Eq4),
        _ => return None,
    };
    Some(RunConfig {
        n: cfg.n,
        grading_p: cfg.grading_p,
        gmres_tol: cfg.gmres_tol,
        gmres_maxit: cfg.gmres_maxit,
        koebe_tol: cfg.koebe_tol,
        koebe_maxit: cfg.koebe_maxit,
        normalization,
        delta: (cfg.delta > 0.0).then_some(cfg.delta),
    })
}

/// # Safety
/// `s` must be a valid NUL-terminated UTF-8 string.
unsafe fn cstr<'a>(s: *const c_char) -> Option<&'a str> {
    if s.is_null() {
        return None;
    }
    CStr::from_ptr(s).to_str().ok()
}

/// Compute a conformal map from a domain described by JSON.
///
/// On success `*out` owns a new map handle.
///
/// # Safety
/// `domain_json` must be a valid NUL-terminated string; `cfg` may be null
/// (defaults are used); `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plg_map_compute(
    domain_json: *const c_char,
    cfg: *const PlgConfig,
    out: *mut *mut PlgMap,
) -> PlgStatus {
    guarded(|| {
        let (Some(json), false) = (cstr(domain_json), out.is_null()) else {
            set_error("null or non-UTF-8 argument");
            return PlgStatus::InvalidArgument;
        };
        let cfg = if cfg.is_null() {
            plg_config_default()
        } else {
            *cfg
        };
        let Some(rc) = run_config(&cfg) else {
            set_error("normalization selector out of range");
            return PlgStatus::InvalidArgument;
        };
        let (domain, _warnings) = match domain_from_json(json) {
            Ok(v) => v,
            Err(e) => return fail(&e),
        };
        match compute_map(&domain, &rc) {
            Ok(map) => {
                *out = Box::into_raw(Box::new(PlgMap { inner: map }));
                PlgStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Deserialize a map previously produced by `plg_map_to_json`.
///
/// # Safety
/// `map_json` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn plg_map_from_json(
    map_json: *const c_char,
    out: *mut *mut PlgMap,
) -> PlgStatus {
    guarded(|| {
        let (Some(json), false) = (cstr(map_json), out.is_null()) else {
            set_error("null or non-UTF-8 argument");
            return PlgStatus::InvalidArgument;
        };
        match ConformalMap::from_json_str(json) {
            Ok(map) => {
                *out = Box::into_raw(Box::new(PlgMap { inner: map }));
                PlgStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Serialize a map to its JSON form.  The returned string must be released
/// with `plg_string_free`.
///
/// # Safety
/// `map` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn plg_map_to_json(map: *const PlgMap, out: *mut *mut c_char) -> PlgStatus {
    guarded(|| {
        if map.is_null() || out.is_null() {
            set_error("null argument");
            return PlgStatus::InvalidArgument;
        }
        let json = (*map).inner.to_json_string();
        match CString::new(json) {
            Ok(c) => {
                *out = c.into_raw();
                PlgStatus::Ok
            }
            Err(_) => {
                set_error("serialized map contains NUL");
                PlgStatus::IoError
            }
        }
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from `plg_map_to_json` and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn plg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Release a map handle.
///
/// # Safety
/// `map` must come from this library and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn plg_map_free(map: *mut PlgMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Number of boundary components; 0 for a null handle.
///
/// # Safety
/// `map` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn plg_map_connectivity(map: *const PlgMap) -> usize {
    if map.is_null() {
        0
    } else {
        (*map).inner.connectivity()
    }
}

/// Centers (interleaved, `2m` doubles) and radii (`m` doubles) of the
/// circular domain.  Either output pointer may be null to skip it.
///
/// # Safety
/// `map` must be a live handle; non-null outputs must have the capacities
/// stated above for `m = plg_map_connectivity(map)`.
#[no_mangle]
pub unsafe extern "C" fn plg_map_circles(
    map: *const PlgMap,
    centers: *mut f64,
    radii: *mut f64,
) -> PlgStatus {
    guarded(|| {
        if map.is_null() {
            set_error("null map");
            return PlgStatus::InvalidArgument;
        }
        let circ = (*map).inner.circular_domain();
        if !centers.is_null() {
            for (i, c) in circ.centers.iter().enumerate() {
                *centers.add(2 * i) = c.re;
                *centers.add(2 * i + 1) = c.im;
            }
        }
        if !radii.is_null() {
            for (i, &r) in circ.radii.iter().enumerate() {
                *radii.add(i) = r;
            }
        }
        PlgStatus::Ok
    })
}

/// Evaluation directions of `plg_map_eval`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlgDirection {
    /// `f`: polygonal domain to circular domain.
    Forward = 0,
    /// `f⁻¹`: circular domain to polygonal domain.
    Inverse = 1,
}

/// Evaluate the map (or its first derivative when `deriv` is nonzero) at
/// `count` points.  `points` and `values` are interleaved arrays of
/// `2*count` doubles; points outside the region produce NaN pairs, and
/// their number is written to `*outside_count` when non-null.
///
/// # Safety
/// `map` must be a live handle; `points` and `values` must hold `2*count`
/// doubles each.
#[no_mangle]
pub unsafe extern "C" fn plg_map_eval(
    map: *const PlgMap,
    direction: PlgDirection,
    deriv: i32,
    points: *const f64,
    count: usize,
    values: *mut f64,
    outside_count: *mut usize,
) -> PlgStatus {
    guarded(|| {
        if map.is_null() || (points.is_null() || values.is_null()) && count > 0 {
            set_error("null argument");
            return PlgStatus::InvalidArgument;
        }
        let pts: Vec<C64> = (0..count)
            .map(|i| C64::new(*points.add(2 * i), *points.add(2 * i + 1)))
            .collect();
        let inner = &(*map).inner;
        let report = match (direction, deriv != 0) {
            (PlgDirection::Forward, false) => inner.eval_forward(&pts),
            (PlgDirection::Forward, true) => inner.deriv_forward(&pts),
            (PlgDirection::Inverse, false) => inner.eval_inverse(&pts),
            (PlgDirection::Inverse, true) => inner.deriv_inverse(&pts),
        };
        for (i, v) in report.values.iter().enumerate() {
            *values.add(2 * i) = v.re;
            *values.add(2 * i + 1) = v.im;
        }
        if !outside_count.is_null() {
            *outside_count = report.outside.len();
        }
        PlgStatus::Ok
    })
}
