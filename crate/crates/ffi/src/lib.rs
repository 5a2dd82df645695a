//! C ABI for coupled alpha filtrations.
//!
//! Point clouds are passed as row-major `double` arrays of `n * dim` entries.
//! Every fallible call returns a [`CacStatus`]; outputs are written only on
//! [`CacStatus::Ok`]. Handles are opaque and must be released with
//! [`cac_filtration_free`].

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use coupled_alpha::{
    coupled_alpha_infty, coupled_filtration, persistence_diagram, Error, FilteredComplex, Interval, Point,
    PointCloudPair,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotInGeneralPosition = 3,
    Numerical = 4,
    Internal = 5,
}

impl From<&Error> for CacStatus {
    fn from(e: &Error) -> Self {
        if e.is_general_position_failure() {
            return CacStatus::NotInGeneralPosition;
        }
        match e.kind() {
            "EmptyInput" | "NonFinite" | "DimensionMismatch" | "DimensionOverflow" | "TooFewPoints" | "TooLarge" => {
                CacStatus::InvalidArgument
            }
            _ => CacStatus::Numerical,
        }
    }
}

/// A coupled alpha filtration and its persistence diagram.
pub struct CacFiltration {
    filtration: FilteredComplex,
    order: Vec<usize>,
    intervals: Vec<Interval>,
}

/// Static, NUL-terminated description of `status`.
#[no_mangle]
pub extern "C" fn cac_status_message(status: CacStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        CacStatus::Ok => b"ok\0",
        CacStatus::NullPointer => b"null pointer argument\0",
        CacStatus::InvalidArgument => b"invalid argument\0",
        CacStatus::NotInGeneralPosition => b"input is not in coupled general position\0",
        CacStatus::Numerical => b"numerical failure\0",
        CacStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}

fn guard(f: impl FnOnce() -> CacStatus) -> CacStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(CacStatus::Internal)
}

/// # Safety
/// `coords` must point to `n * dim` readable doubles unless `n == 0`.
unsafe fn read_cloud(coords: *const f64, n: usize, dim: usize) -> Result<Vec<Point>, CacStatus> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if coords.is_null() {
        return Err(CacStatus::NullPointer);
    }
    let len = n.checked_mul(dim).ok_or(CacStatus::InvalidArgument)?;
    let flat = std::slice::from_raw_parts(coords, len);
    flat.chunks_exact(dim).map(|c| Point::new(c.to_vec()).map_err(|e| CacStatus::from(&e))).collect()
}

/// # Safety
/// As for [`read_cloud`], for both clouds.
unsafe fn read_pair(x: *const f64, n_x: usize, y: *const f64, n_y: usize, dim: usize) -> Result<PointCloudPair, CacStatus> {
    if dim == 0 {
        return Err(CacStatus::InvalidArgument);
    }
    let x = read_cloud(x, n_x, dim)?;
    let y = read_cloud(y, n_y, dim)?;
    PointCloudPair::new(x, y).map_err(|e| CacStatus::from(&e))
}

fn valid_epsilon(eps: f64) -> bool {
    eps.is_finite() && eps >= 0.0
}

/// Builds the coupled alpha filtration of `X` (`n_x` points) and `Y` (`n_y`
/// points) in `R^dim` and stores a new handle in `*out`. Vertex `i < n_x` is
/// `X[i]`; vertex `n_x + j` is `Y[j]`.
///
/// # Safety
/// `x` and `y` must point to `n_x * dim` and `n_y * dim` readable doubles
/// (either may be null when its count is 0). `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cac_filtration_new(
    x: *const f64,
    n_x: usize,
    y: *const f64,
    n_y: usize,
    dim: usize,
    epsilon: f64,
    out: *mut *mut CacFiltration,
) -> CacStatus {
    guard(|| {
        if out.is_null() {
            return CacStatus::NullPointer;
        }
        if !valid_epsilon(epsilon) {
            return CacStatus::InvalidArgument;
        }
        let pair = match read_pair(x, n_x, y, n_y, dim) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let built = coupled_alpha_infty(&pair, epsilon)
            .and_then(|c| coupled_filtration(&c, epsilon))
            .and_then(|f| persistence_diagram(&f).map(|d| (f, d)));
        match built {
            Ok((filtration, diagram)) => {
                let order = filtration.filtration_order();
                let intervals = diagram.intervals().cloned().collect();
                *out = Box::into_raw(Box::new(CacFiltration { filtration, order, intervals }));
                CacStatus::Ok
            }
            Err(e) => CacStatus::from(&e),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `f` must be null or a handle from [`cac_filtration_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cac_filtration_free(f: *mut CacFiltration) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of simplexes; 0 for null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cac_filtration_len(f: *const CacFiltration) -> usize {
    f.as_ref().map_or(0, |f| f.filtration.len())
}

/// The `index`-th simplex in `(value, dim, lex)` order. Writes its value, its
/// vertex count to `*len`, and up to `capacity` vertex indices to `vertices`.
/// A `capacity` below the vertex count gives `InvalidArgument` with `*len` set.
///
/// # Safety
/// `f` must be a live handle; `value` and `len` writable; `vertices` writable
/// for `capacity` entries (may be null when `capacity == 0`).
#[no_mangle]
pub unsafe extern "C" fn cac_filtration_simplex(
    f: *const CacFiltration,
    index: usize,
    vertices: *mut usize,
    capacity: usize,
    len: *mut usize,
    value: *mut f64,
) -> CacStatus {
    guard(|| {
        let (Some(f), false, false) = (f.as_ref(), len.is_null(), value.is_null()) else {
            return CacStatus::NullPointer;
        };
        let Some(&i) = f.order.get(index) else { return CacStatus::InvalidArgument };
        let s = &f.filtration.simplices()[i];
        *len = s.len();
        if capacity < s.len() {
            return CacStatus::InvalidArgument;
        }
        if vertices.is_null() {
            return CacStatus::NullPointer;
        }
        ptr::copy_nonoverlapping(s.vertices().as_ptr(), vertices, s.len());
        *value = f.filtration.values()[i];
        CacStatus::Ok
    })
}

/// Number of persistence intervals of positive length; 0 for null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cac_filtration_interval_count(f: *const CacFiltration) -> usize {
    f.as_ref().map_or(0, |f| f.intervals.len())
}

/// The `index`-th interval `[birth, death)` of homology dimension `*dim`.
/// Essential classes have `death == INFINITY`.
///
/// # Safety
/// `f` must be a live handle; `dim`, `birth` and `death` writable.
#[no_mangle]
pub unsafe extern "C" fn cac_filtration_interval(
    f: *const CacFiltration,
    index: usize,
    dim: *mut usize,
    birth: *mut f64,
    death: *mut f64,
) -> CacStatus {
    guard(|| {
        let (Some(f), false, false, false) = (f.as_ref(), dim.is_null(), birth.is_null(), death.is_null()) else {
            return CacStatus::NullPointer;
        };
        let Some(i) = f.intervals.get(index) else { return CacStatus::InvalidArgument };
        *dim = i.dim;
        *birth = i.birth;
        *death = i.death;
        CacStatus::Ok
    })
}

/// Exhaustive coupled general position check. Returns `Ok` or
/// `NotInGeneralPosition` and writes the number of violations to
/// `*violations` when it is non-null.
///
/// # Safety
/// As for [`cac_filtration_new`]; `violations` may be null.
#[no_mangle]
pub unsafe extern "C" fn cac_check_general_position(
    x: *const f64,
    n_x: usize,
    y: *const f64,
    n_y: usize,
    dim: usize,
    epsilon: f64,
    violations: *mut usize,
) -> CacStatus {
    guard(|| {
        if !valid_epsilon(epsilon) {
            return CacStatus::InvalidArgument;
        }
        let pair = match read_pair(x, n_x, y, n_y, dim) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let report = pair.check_general_position(epsilon);
        if !violations.is_null() {
            *violations = report.violations.len();
        }
        if report.is_ok() {
            CacStatus::Ok
        } else {
            CacStatus::NotInGeneralPosition
        }
    })
}
