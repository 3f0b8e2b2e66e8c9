//! C ABI for `singseries`.
//!
//! Conventions:
//!
//! - Every fallible function returns an [`SsStatus`] and writes results
//!   through out-pointers, which are left untouched on failure.
//! - On failure a message is kept per thread; read it with
//!   [`ss_last_error_message`]. The pointer stays valid until the next failing
//!   call on the same thread.
//! - Handles ([`SsPrimeTable`], [`SsFamily`]) are opaque and owned by the
//!   caller; release them with the matching `_free` function. Strings
//!   returned by the library are released with [`ss_string_free`].
//! - Panics never cross the boundary; they surface as `SS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use singseries::numeric::{is_prime_u64, sieve_primes, PrimeTable};
use singseries::polyfam::PolyFamily;
use singseries::singular::{singular_series_family, singular_series_tuple, BaseConstant, EulerProductValue, Mode};
use singseries::tuples::KTuple;
use singseries::{Error, ErrorKind};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    InvalidParameter = 1,
    Arithmetic = 2,
    Capability = 3,
    Budget = 4,
    Io = 5,
    NullPointer = 6,
    Panic = 7,
}

impl From<ErrorKind> for SsStatus {
    fn from(k: ErrorKind) -> Self {
        match k {
            ErrorKind::InvalidParameter => SsStatus::InvalidParameter,
            ErrorKind::Arithmetic => SsStatus::Arithmetic,
            ErrorKind::Capability => SsStatus::Capability,
            ErrorKind::Budget => SsStatus::Budget,
            ErrorKind::Io => SsStatus::Io,
        }
    }
}

/// A truncated Euler product.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsEulerValue {
    pub value: f64,
    pub cutoff: u64,
    /// Bound on the log of the omitted factors when `rigorous`, otherwise the
    /// spread between the cutoff and half the cutoff.
    pub tail_log_bound: f64,
    pub rigorous: bool,
    pub exact_zero: bool,
}

impl From<EulerProductValue> for SsEulerValue {
    fn from(v: EulerProductValue) -> Self {
        Self {
            value: v.value,
            cutoff: v.cutoff,
            tail_log_bound: v.tail_log_bound,
            rigorous: v.mode == Mode::Rigorous,
            exact_zero: v.exact_zero,
        }
    }
}

/// Primes up to a limit.
pub struct SsPrimeTable(PrimeTable);

/// A polynomial family.
pub struct SsFamily(PolyFamily);

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SsStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            e.kind().into()
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            SsStatus::NullPointer
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SsStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::Parse(format!("{what} is not UTF-8"))))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message of the last failing call on this thread, or NULL.
#[no_mangle]
pub extern "C" fn ss_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ss_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ss_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Deterministic primality for any 64-bit `n`.
#[no_mangle]
pub extern "C" fn ss_is_prime(n: u64) -> bool {
    is_prime_u64(n)
}

/// Sieve the primes up to `limit` (2 <= limit <= 2^40).
///
/// # Safety
/// `table` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn ss_prime_table_new(limit: u64, table: *mut *mut SsPrimeTable) -> SsStatus {
    guard(|| {
        let slot = out(table, "table")?;
        let t = sieve_primes(limit)?;
        *slot = Box::into_raw(Box::new(SsPrimeTable(t)));
        Ok(())
    })
}

/// # Safety
/// `table` must be NULL or a handle from [`ss_prime_table_new`].
#[no_mangle]
pub unsafe extern "C" fn ss_prime_table_free(table: *mut SsPrimeTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of primes in the table; 0 for NULL.
///
/// # Safety
/// `table` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_prime_table_len(table: *const SsPrimeTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.len())
}

/// The `index`-th prime (0-based).
///
/// # Safety
/// `table` must be a live handle and `prime` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_prime_table_get(table: *const SsPrimeTable, index: usize, prime: *mut u64) -> SsStatus {
    guard(|| {
        let t = table.as_ref().ok_or(Failure::Null("table"))?;
        let slot = out(prime, "prime")?;
        let p = t.0.primes().get(index).ok_or_else(|| {
            Error::Bounds(format!("index {index} outside table of {} primes", t.0.len()))
        })?;
        *slot = *p;
        Ok(())
    })
}

/// Number of primes `<= x` in the table (x is clamped to the table limit).
///
/// # Safety
/// `table` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_prime_table_count_up_to(table: *const SsPrimeTable, x: u64) -> usize {
    table.as_ref().map_or(0, |t| t.0.count_up_to(x))
}

/// Singular series of the k-tuple `entries[0..k]` truncated at `cutoff`.
///
/// # Safety
/// `entries` must point to `k` readable values and `value` be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_singular_series_tuple(
    entries: *const u64,
    k: usize,
    cutoff: u64,
    value: *mut SsEulerValue,
) -> SsStatus {
    guard(|| {
        if entries.is_null() {
            return Err(Failure::Null("entries"));
        }
        let slot = out(value, "value")?;
        let h = KTuple::new(std::slice::from_raw_parts(entries, k).to_vec())?;
        let base = BaseConstant::new(h.k(), cutoff)?;
        *slot = singular_series_tuple(&h, cutoff, Some(&base))?.into();
        Ok(())
    })
}

/// Parse a family such as `"x,2*x+1"` or `"x^2+1"`.
///
/// # Safety
/// `source` must be a NUL-terminated string and `family` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_family_parse(source: *const c_char, family: *mut *mut SsFamily) -> SsStatus {
    guard(|| {
        let s = text(source, "text")?;
        let slot = out(family, "family")?;
        let f: PolyFamily = s.parse()?;
        *slot = Box::into_raw(Box::new(SsFamily(f)));
        Ok(())
    })
}

/// # Safety
/// `family` must be NULL or a handle from [`ss_family_parse`].
#[no_mangle]
pub unsafe extern "C" fn ss_family_free(family: *mut SsFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Canonical text of the family; release with [`ss_string_free`]. NULL for a NULL handle.
///
/// # Safety
/// `family` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_family_to_string(family: *const SsFamily) -> *mut c_char {
    family
        .as_ref()
        .map_or(std::ptr::null_mut(), |f| into_c_string(f.0.to_string()))
}

/// Number of members.
///
/// # Safety
/// `family` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_family_len(family: *const SsFamily) -> usize {
    family.as_ref().map_or(0, |f| f.0.m())
}

/// Partial Euler product of a primitive family (heuristic spread in `tail_log_bound`).
///
/// # Safety
/// `family` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_family_singular_series(
    family: *const SsFamily,
    cutoff: u64,
    value: *mut SsEulerValue,
) -> SsStatus {
    guard(|| {
        let f = family.as_ref().ok_or(Failure::Null("family"))?;
        let slot = out(value, "value")?;
        *slot = singular_series_family(&f.0, cutoff)?.into();
        Ok(())
    })
}

/// Number of seeds `n <= limit` at which every member is a positive prime.
///
/// # Safety
/// `family` must be a live handle and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_family_count_seeds(family: *const SsFamily, limit: u64, count: *mut u64) -> SsStatus {
    guard(|| {
        let f = family.as_ref().ok_or(Failure::Null("family"))?;
        let slot = out(count, "count")?;
        *slot = singseries::patterns::count_prime_seeds(&f.0, limit)?;
        Ok(())
    })
}

/// Moment constant `mu_k(m)` truncated at `cutoff`, with its tail bound.
///
/// # Safety
/// `value` and `tail_log_bound` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_mu(k: u32, m: u32, cutoff: u64, value: *mut f64, tail_log_bound: *mut f64) -> SsStatus {
    guard(|| {
        let v = out(value, "value")?;
        let t = out(tail_log_bound, "tail_log_bound")?;
        let r = singseries::moments::mu(k, m, cutoff)?;
        *v = r.value;
        *t = r.tail_log_bound;
        Ok(())
    })
}

/// k-th moment of a Poisson(lambda) variable.
///
/// # Safety
/// `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_poisson_moment(k: u32, lambda: f64, value: *mut f64) -> SsStatus {
    guard(|| {
        let v = out(value, "value")?;
        *v = singseries::moments::poisson_moment(k, lambda)?;
        Ok(())
    })
}

/// Exact nonvanishing probability as `"num/den"`; release with [`ss_string_free`].
///
/// # Safety
/// `fraction` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_nonvanishing_probability(k: u32, fraction: *mut *mut c_char) -> SsStatus {
    guard(|| {
        let slot = out(fraction, "fraction")?;
        let q = singseries::moments::nonvanishing_probability(k)?;
        *slot = into_c_string(format!("{}/{}", q.numer(), q.denom()));
        Ok(())
    })
}
