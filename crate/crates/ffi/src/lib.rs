//! C interface to `qpairings`.
//!
//! Every function returns a [`QpStatus`]; results go through out-pointers.
//! On failure a description is kept per thread and can be read with
//! [`qp_last_error_message`]. Tables and simulation configurations are
//! opaque handles that must be released with their `_free` function, and
//! strings returned by the library must be released with [`qp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigInt;
use num_rational::BigRational;

use qpairings::pairings::{pairing_count, weighted_sum_general, EnumerationCaps, PairingClass};
use qpairings::polynomial::WeightPoly;
use qpairings::qcatalan::{bk_phi_consistency, bk_recurrence, phi_recurrence};
use qpairings::rmt_sim::{estimate_moment, limit_reference, RmtConfig};
use qpairings::scalar_moments::{log_moment, moment_exact, ExactOptions};
use qpairings::{Error, KernelSpec};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CapExceeded = 3,
    Overflow = 4,
    KernelDomain = 5,
    KernelNotPsd = 6,
    InvalidWeight = 7,
    NoSignChange = 8,
    Panic = 99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpClass {
    All = 0,
    NonCrossing = 1,
}

impl From<QpClass> for PairingClass {
    fn from(c: QpClass) -> Self {
        match c {
            QpClass::All => PairingClass::All,
            QpClass::NonCrossing => PairingClass::NonCrossing,
        }
    }
}

/// Result of a Monte Carlo run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QpEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub var_trace: f64,
    pub samples: u64,
    /// Large-N limit of the moment for the configured kernel.
    pub reference: f64,
    pub z_score: f64,
}

/// Table of polynomials indexed by `k = 0..len`.
pub struct QpPolyTable {
    entries: Vec<WeightPoly>,
}

/// Monte Carlo configuration.
pub struct QpSimConfig {
    inner: RmtConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QpStatus {
    match e {
        Error::CapExceeded { .. } => QpStatus::CapExceeded,
        Error::CountOverflow { .. } => QpStatus::Overflow,
        Error::KernelDomain { .. } => QpStatus::KernelDomain,
        Error::KernelNotPsd { .. } => QpStatus::KernelNotPsd,
        Error::InvalidWeight(_) | Error::ZeroDenominator => QpStatus::InvalidWeight,
        Error::NoSignChange { .. } => QpStatus::NoSignChange,
        _ => QpStatus::InvalidArgument,
    }
}

fn fail(status: QpStatus, msg: impl Into<String>) -> QpStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, recording errors and turning panics into [`QpStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), QpStatus>) -> QpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QpStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(QpStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: qpairings::Result<T>) -> Result<T, QpStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn check_out<T>(out: *mut T) -> Result<(), QpStatus> {
    if out.is_null() {
        Err(fail(QpStatus::NullPointer, "output pointer is null"))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn qp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qp_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by CString::into_raw in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Number of pairings of `2k` points in `class`.
///
/// # Safety
/// `out` must point to writable memory for one `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn qp_pairing_count(k: usize, class: QpClass, out: *mut u64) -> QpStatus {
    guard(|| {
        check_out(out)?;
        let n = lift(pairing_count(k, class.into()))?;
        // SAFETY: checked non-null; caller guarantees validity.
        unsafe { *out = n };
        Ok(())
    })
}

/// Exact pairing moment at `p = num / den`, written as a newly allocated
/// decimal fraction string such as `"3/8"`.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_moment_exact(
    k: usize,
    class: QpClass,
    num: i64,
    den: i64,
    out: *mut *mut c_char,
) -> QpStatus {
    guard(|| {
        check_out(out)?;
        if den == 0 {
            return Err(fail(QpStatus::InvalidWeight, "denominator is zero"));
        }
        let p = BigRational::new(BigInt::from(num), BigInt::from(den));
        let v = lift(moment_exact(k, class.into(), &p, &ExactOptions::default()))?;
        // SAFETY: checked non-null.
        unsafe { *out = into_c_string(v.to_string()) };
        Ok(())
    })
}

/// Natural log of the pairing moment at `0 < p <= 1`.
///
/// # Safety
/// `out` must point to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn qp_moment_log(k: usize, class: QpClass, p: f64, out: *mut f64) -> QpStatus {
    guard(|| {
        check_out(out)?;
        let v = lift(log_moment(k, class.into(), p))?;
        // SAFETY: checked non-null.
        unsafe { *out = v };
        Ok(())
    })
}

/// Pairing sum for the tabulated kernel `values[0..len]` (lag 0 first).
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` to one writable
/// double.
#[no_mangle]
pub unsafe extern "C" fn qp_weighted_sum_table(
    k: usize,
    class: QpClass,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> QpStatus {
    guard(|| {
        check_out(out)?;
        let kernel = lift(KernelSpec::table(unsafe { read_slice(values, len) }?))?;
        let v = lift(weighted_sum_general(
            k,
            class.into(),
            &kernel,
            &EnumerationCaps::default(),
        ))?;
        // SAFETY: checked non-null.
        unsafe { *out = v };
        Ok(())
    })
}

/// # Safety
/// `values` must point to `len` readable doubles when `len > 0`.
unsafe fn read_slice(values: *const f64, len: usize) -> Result<Vec<f64>, QpStatus> {
    if len == 0 {
        return Err(fail(QpStatus::InvalidArgument, "empty kernel table"));
    }
    if values.is_null() {
        return Err(fail(QpStatus::NullPointer, "kernel values pointer is null"));
    }
    // SAFETY: caller guarantees `len` readable elements.
    Ok(unsafe { std::slice::from_raw_parts(values, len) }.to_vec())
}

fn new_table(entries: Vec<WeightPoly>, out: *mut *mut QpPolyTable) -> Result<(), QpStatus> {
    let handle = Box::into_raw(Box::new(QpPolyTable { entries }));
    // SAFETY: caller checked `out`.
    unsafe { *out = handle };
    Ok(())
}

/// Table of `B_0 .. B_{k_max}`.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_bk_table_new(k_max: usize, out: *mut *mut QpPolyTable) -> QpStatus {
    guard(|| {
        check_out(out)?;
        new_table(bk_recurrence(k_max).entries, out)
    })
}

/// Table of `phi_0 .. phi_{k_max}`.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_phi_table_new(k_max: usize, out: *mut *mut QpPolyTable) -> QpStatus {
    guard(|| {
        check_out(out)?;
        new_table(phi_recurrence(k_max).entries, out)
    })
}

/// # Safety
/// `table` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn qp_poly_table_len(table: *const QpPolyTable) -> usize {
    // SAFETY: caller guarantees a live handle or NULL.
    unsafe { table.as_ref() }.map_or(0, |t| t.entries.len())
}

/// # Safety
/// `table` must be NULL or a live handle from this library.
unsafe fn entry<'a>(table: *const QpPolyTable, k: usize) -> Result<&'a WeightPoly, QpStatus> {
    // SAFETY: caller guarantees a live handle or NULL.
    let t = unsafe { table.as_ref() }.ok_or_else(|| fail(QpStatus::NullPointer, "table handle is null"))?;
    t.entries.get(k).ok_or_else(|| {
        fail(
            QpStatus::InvalidArgument,
            format!("k = {k} beyond table of {}", t.entries.len()),
        )
    })
}

/// Evaluates entry `k` at `x` in floating point.
///
/// # Safety
/// `table` must be a live handle and `out` must point to one writable double.
#[no_mangle]
pub unsafe extern "C" fn qp_poly_table_eval(table: *const QpPolyTable, k: usize, x: f64, out: *mut f64) -> QpStatus {
    guard(|| {
        check_out(out)?;
        let poly = unsafe { entry(table, k) }?;
        // SAFETY: checked non-null.
        unsafe { *out = poly.eval_f64(x) };
        Ok(())
    })
}

/// Entry `k` as JSON, `{"terms":[[exponent,"coefficient"],...]}`.
///
/// # Safety
/// `table` must be a live handle and `out` must point to one writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_poly_table_to_json(table: *const QpPolyTable, k: usize, out: *mut *mut c_char) -> QpStatus {
    guard(|| {
        check_out(out)?;
        let poly = unsafe { entry(table, k) }?;
        let json = serde_json::to_string(poly).map_err(|e| fail(QpStatus::InvalidArgument, e.to_string()))?;
        // SAFETY: checked non-null.
        unsafe { *out = into_c_string(json) };
        Ok(())
    })
}

/// # Safety
/// `table` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn qp_poly_table_free(table: *mut QpPolyTable) {
    if !table.is_null() {
        // SAFETY: produced by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(table) });
    }
}

/// Whether `B_k(p) = p^k phi_k(p^2)` holds exactly for every `k <= k_max`.
///
/// # Safety
/// `out` must point to one writable `bool`.
#[no_mangle]
pub unsafe extern "C" fn qp_check_bk_phi(k_max: usize, out: *mut bool) -> QpStatus {
    guard(|| {
        check_out(out)?;
        // SAFETY: checked non-null.
        unsafe { *out = bk_phi_consistency(k_max).all_pass() };
        Ok(())
    })
}

/// Geometric-kernel configuration `V(r) = p^|r|`.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_sim_config_new(
    n: usize,
    k: usize,
    p: f64,
    samples: usize,
    seed: u64,
    out: *mut *mut QpSimConfig,
) -> QpStatus {
    guard(|| {
        check_out(out)?;
        let inner = lift(RmtConfig::geometric(n, k, p, samples, seed))?;
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(QpSimConfig { inner })) };
        Ok(())
    })
}

/// Replaces the kernel by the table `values[0..len]`, lag 0 first.
///
/// # Safety
/// `cfg` must be a live handle and `values` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qp_sim_config_set_table_kernel(
    cfg: *mut QpSimConfig,
    values: *const f64,
    len: usize,
) -> QpStatus {
    guard(|| {
        // SAFETY: caller guarantees a live handle or NULL.
        let cfg = unsafe { cfg.as_mut() }.ok_or_else(|| fail(QpStatus::NullPointer, "config handle is null"))?;
        let kernel = lift(KernelSpec::table(unsafe { read_slice(values, len) }?))?;
        lift(kernel.toeplitz_factor(len))?;
        cfg.inner.kernel = kernel;
        Ok(())
    })
}

/// Runs the Monte Carlo estimate of `E (1/N) Tr(A^(1) ... A^(2k))`.
///
/// # Safety
/// `cfg` must be a live handle and `out` must point to one `QpEstimate`.
#[no_mangle]
pub unsafe extern "C" fn qp_sim_estimate(cfg: *const QpSimConfig, out: *mut QpEstimate) -> QpStatus {
    guard(|| {
        check_out(out)?;
        // SAFETY: caller guarantees a live handle or NULL.
        let cfg = unsafe { cfg.as_ref() }.ok_or_else(|| fail(QpStatus::NullPointer, "config handle is null"))?;
        let est = lift(estimate_moment(&cfg.inner))?;
        let reference = lift(limit_reference(&cfg.inner.kernel, cfg.inner.k))?;
        let result = QpEstimate {
            mean: est.mean,
            std_error: est.stderr,
            var_trace: est.var_trace,
            samples: est.samples as u64,
            reference,
            z_score: est.z_score(reference),
        };
        // SAFETY: checked non-null.
        unsafe { *out = result };
        Ok(())
    })
}

/// # Safety
/// `cfg` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn qp_sim_config_free(cfg: *mut QpSimConfig) {
    if !cfg.is_null() {
        // SAFETY: produced by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(cfg) });
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
