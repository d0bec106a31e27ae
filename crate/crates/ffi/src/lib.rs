//! C ABI over `qflat`.
//!
//! Lattices cross the boundary as opaque `QflatLattice` handles. Every call
//! returns a `QflatCode`; on failure a message is kept per thread and can be
//! read with [`qflat_last_error`]. Strings returned to the caller are freed
//! with [`qflat_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qflat::claims::{run_claim, ClaimParams};
use qflat::represent::{represents_integer_with_budget, represents_lattice_with_budget};
use qflat::{reduce_binary, Budget, GramMatrix, Lattice, QfError, Status};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QflatCode {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    NotPositiveDefinite = 3,
    PreconditionFailed = 4,
    BudgetExceeded = 5,
    Internal = 6,
}

/// Outcome of a named check.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QflatStatus {
    Pass = 0,
    Fail = 1,
    BudgetExceeded = 3,
}

/// Opaque lattice handle.
pub struct QflatLattice {
    inner: Lattice,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn code_of(e: &QfError) -> QflatCode {
    match e {
        QfError::NotPositiveDefinite { .. } => QflatCode::NotPositiveDefinite,
        QfError::BudgetExceeded { .. } => QflatCode::BudgetExceeded,
        QfError::Parse(_)
        | QfError::NotSquare { .. }
        | QfError::NotSymmetric { .. }
        | QfError::DimensionMismatch(_)
        | QfError::InvalidDiscriminant(_)
        | QfError::OddMiddleCoefficient { .. } => QflatCode::InvalidInput,
        QfError::Overflow(_) => QflatCode::Internal,
        _ => QflatCode::PreconditionFailed,
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), QflatCode>) -> QflatCode {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QflatCode::Ok,
        Ok(Err(code)) => code,
        Err(_) => {
            set_error("internal panic".into());
            QflatCode::Internal
        }
    }
}

fn lift<T>(r: qflat::Result<T>) -> Result<T, QflatCode> {
    r.map_err(|e| {
        set_error(e.to_string());
        code_of(&e)
    })
}

fn null_check<T>(p: *const T, name: &str) -> Result<(), QflatCode> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(QflatCode::NullPointer);
    }
    Ok(())
}

fn budget(limit: u64) -> Budget {
    if limit == 0 {
        Budget::default()
    } else {
        Budget::new(limit)
    }
}

unsafe fn read_str<'a>(s: *const c_char, name: &str) -> Result<&'a str, QflatCode> {
    null_check(s, name)?;
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(format!("{name} is not UTF-8"));
        QflatCode::InvalidInput
    })
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn qflat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a lattice from a row-major `n`×`n` Gram matrix.
///
/// # Safety
/// `entries` must point to `n*n` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qflat_lattice_new(entries: *const i64, n: usize, out: *mut *mut QflatLattice) -> QflatCode {
    guard(|| {
        null_check(out, "out")?;
        if n > 0 {
            null_check(entries, "entries")?;
        }
        let flat = if n == 0 { Vec::new() } else { std::slice::from_raw_parts(entries, n * n).to_vec() };
        let g = lift(GramMatrix::from_flat(n, flat))?;
        let l = lift(Lattice::from_gram(g))?;
        *out = Box::into_raw(Box::new(QflatLattice { inner: l }));
        Ok(())
    })
}

/// Parses a lattice from the JSON (`{"gram": [[..]]}`) or text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qflat_lattice_parse(text: *const c_char, out: *mut *mut QflatLattice) -> QflatCode {
    guard(|| {
        null_check(out, "out")?;
        let s = read_str(text, "text")?;
        let l = lift(Lattice::parse(s))?;
        *out = Box::into_raw(Box::new(QflatLattice { inner: l }));
        Ok(())
    })
}

/// # Safety
/// `l` must come from this library and not be freed yet; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qflat_lattice_free(l: *mut QflatLattice) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// # Safety
/// `l` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qflat_lattice_rank(l: *const QflatLattice) -> usize {
    l.as_ref().map_or(0, |l| l.inner.rank())
}

/// Whether `l` has a vector of norm `n`. When it does and `vector` is not
/// NULL, the vector's `rank` coordinates are written there. A `budget_limit` of 0
/// means the default.
///
/// # Safety
/// `l` must be a live handle, `represented` writable, and `vector` NULL or
/// writable for `qflat_lattice_rank(l)` values.
#[no_mangle]
pub unsafe extern "C" fn qflat_represents_integer(
    l: *const QflatLattice,
    n: i64,
    budget_limit: u64,
    represented: *mut bool,
    vector: *mut i64,
) -> QflatCode {
    guard(|| {
        null_check(l, "l")?;
        null_check(represented, "represented")?;
        let l = &(*l).inner;
        let w = lift(represents_integer_with_budget(l, n, &budget(budget_limit)))?;
        *represented = w.is_some();
        if let (Some(v), false) = (w, vector.is_null()) {
            ptr::copy_nonoverlapping(v.coords.as_ptr(), vector, v.coords.len());
        }
        Ok(())
    })
}

/// Whether `source` embeds isometrically in `target`. When it does and
/// `matrix` is not NULL, the row-major target-rank × source-rank embedding
/// is written there. A `budget_limit` of 0 means the default.
///
/// # Safety
/// Both handles must be live, `represented` writable, and `matrix` NULL or
/// writable for rank(target)·rank(source) values.
#[no_mangle]
pub unsafe extern "C" fn qflat_represents_lattice(
    target: *const QflatLattice,
    source: *const QflatLattice,
    budget_limit: u64,
    represented: *mut bool,
    matrix: *mut i64,
) -> QflatCode {
    guard(|| {
        null_check(target, "target")?;
        null_check(source, "source")?;
        null_check(represented, "represented")?;
        let w = lift(represents_lattice_with_budget(&(*target).inner, &(*source).inner, &budget(budget_limit)))?;
        *represented = w.is_some();
        if let (Some(e), false) = (w, matrix.is_null()) {
            ptr::copy_nonoverlapping(e.matrix.as_ptr(), matrix, e.matrix.len());
        }
        Ok(())
    })
}

/// Reduces `[[a,b],[b,c]]`; writes the reduced `(a,b,c)` to `out[0..3]` and
/// the row-major transform to `transform[0..4]` when not NULL.
///
/// # Safety
/// `out` must be writable for 3 values and `transform` NULL or writable for 4.
#[no_mangle]
pub unsafe extern "C" fn qflat_reduce_binary(a: i64, b: i64, c: i64, out: *mut i64, transform: *mut i64) -> QflatCode {
    guard(|| {
        null_check(out, "out")?;
        let g = lift(GramMatrix::from_flat(2, vec![a, b, b, c]))?;
        let (r, u) = lift(reduce_binary(&g))?;
        ptr::copy_nonoverlapping([r.a, r.b, r.c].as_ptr(), out, 3);
        if !transform.is_null() {
            ptr::copy_nonoverlapping([u[0][0], u[0][1], u[1][0], u[1][1]].as_ptr(), transform, 4);
        }
        Ok(())
    })
}

/// Runs a named check with its default parameters and returns the JSON
/// report in `json` (free with [`qflat_string_free`]).
///
/// # Safety
/// `claim` must be a NUL-terminated string; `status` and `json` writable.
#[no_mangle]
pub unsafe extern "C" fn qflat_verify_claim(
    claim: *const c_char,
    status: *mut QflatStatus,
    json: *mut *mut c_char,
) -> QflatCode {
    guard(|| {
        null_check(status, "status")?;
        null_check(json, "json")?;
        let id = read_str(claim, "claim")?;
        let rep = lift(run_claim(id, &ClaimParams::default()))?;
        *status = match rep.status {
            Status::Pass => QflatStatus::Pass,
            Status::Fail => QflatStatus::Fail,
            Status::BudgetExceeded => QflatStatus::BudgetExceeded,
        };
        *json = CString::new(rep.to_json_string()).expect("no NUL in JSON").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed yet; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qflat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
