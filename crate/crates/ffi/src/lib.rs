//! C ABI over `ptinfo`.
//!
//! Every fallible function returns a [`PtStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can
//! be read with [`pt_last_error_message`]. States are opaque handles owned
//! by the caller and released with [`pt_state_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ptinfo::fixtures::{validate_identities, FixtureSet};
use ptinfo::information::information_report;
use ptinfo::model::{potential_value, PotentialParams, QuantumNumbers, State, DEFAULT_D0};
use ptinfo::observables::{uncertainty_report, KineticMode, StateObservables};
use ptinfo::quadrature::{Integrator, QuadratureConfig};
use ptinfo::specfun::{jacobi, JacobiParams};
use ptinfo::spectrum;
use ptinfo::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    NotBound = 3,
    MagneticOutOfRange = 4,
    /// Quadrature or special-function failure.
    Numerical = 5,
    Unsupported = 6,
    Fixture = 7,
    /// `pt_validate_fixtures` found printed values that break an identity.
    IdentityFailure = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PtKineticMode {
    Printed = 0,
    Identity = 1,
    Derivative = 2,
}

impl From<PtKineticMode> for KineticMode {
    fn from(m: PtKineticMode) -> Self {
        match m {
            PtKineticMode::Printed => KineticMode::Printed,
            PtKineticMode::Identity => KineticMode::Identity,
            PtKineticMode::Derivative => KineticMode::Derivative,
        }
    }
}

/// Inputs for [`pt_state_new`]. `pt_params_default` fills table units.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtParams {
    pub lambda: f64,
    pub alpha: f64,
    pub hbar: f64,
    /// Twice the reduced mass.
    pub two_mu: f64,
    pub d0: f64,
    pub n: u32,
    pub l: u32,
    pub m: i32,
}

/// Opaque bound state.
pub struct PtState {
    state: State,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PtObservables {
    pub energy: f64,
    pub r2: f64,
    /// ⟨p²⟩ in the requested mode.
    pub p2: f64,
    pub p2_printed: f64,
    pub p2_identity: f64,
    pub p2_derivative: f64,
    pub r_inv2_numeric: f64,
    pub r_inv2_hft: f64,
    pub tanh2: f64,
    pub norm_constant: f64,
    pub delta_r: f64,
    pub delta_p: f64,
    pub product2: f64,
    pub bound: f64,
    /// 1 when (Δr)² < 0.5.
    pub squeezed: i32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PtInformation {
    pub fisher_rho: f64,
    pub fisher_gamma: f64,
    pub product: f64,
    pub product_bound: f64,
    pub cramer_rao: f64,
    pub cramer_rao_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> PtStatus {
    match e {
        Error::InvalidParameter { .. } | Error::InvalidInterval { .. } => {
            PtStatus::InvalidParameter
        }
        Error::NotBound { .. } => PtStatus::NotBound,
        Error::MagneticOutOfRange { .. } => PtStatus::MagneticOutOfRange,
        Error::JacobiOverflow { .. }
        | Error::UnsupportedOrder(_)
        | Error::NonFiniteIntegrand { .. }
        | Error::NoConvergence { .. } => PtStatus::Numerical,
        Error::Unsupported(_) => PtStatus::Unsupported,
        Error::UnknownTable(_)
        | Error::MalformedFixture { .. }
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_) => PtStatus::Fixture,
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard<F: FnOnce() -> Result<(), (PtStatus, String)>>(f: F) -> PtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            PtStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            PtStatus::Panic
        }
    }
}

fn lift<T>(r: ptinfo::Result<T>) -> Result<T, (PtStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (PtStatus, String) {
    (PtStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (PtStatus, String)> {
    // SAFETY: caller guarantees `p` is null or valid for reads.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), (PtStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, by contract, valid for writes.
    unsafe { p.write(value) };
    Ok(())
}

fn params_of(p: &PtParams) -> ptinfo::Result<PotentialParams> {
    PotentialParams::new(p.lambda, p.alpha, p.hbar, 0.5 * p.two_mu)
}

fn integrator(rel_tol: f64) -> ptinfo::Result<Integrator> {
    let rel_tol = if rel_tol > 0.0 { rel_tol } else { 1e-10 };
    Integrator::new(QuadratureConfig {
        rel_tol,
        abs_tol: 0.0,
        ..QuadratureConfig::default()
    })
}

/// Table units (ħ = 2μ = α = 1, d0 = 1/12), λ = 1 and the ground state.
#[no_mangle]
pub extern "C" fn pt_params_default() -> PtParams {
    PtParams {
        lambda: 1.0,
        alpha: 1.0,
        hbar: 1.0,
        two_mu: 1.0,
        d0: DEFAULT_D0,
        n: 0,
        l: 0,
        m: 0,
    }
}

/// Build a state. On success `*out` owns a handle for [`pt_state_free`].
///
/// # Safety
/// `params` must be null or point to a valid `PtParams`; `out` must be null
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_state_new(params: *const PtParams, out: *mut *mut PtState) -> PtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = unsafe { deref(params, "params") }?;
        let q = lift(QuantumNumbers::new(p.n, p.l, p.m))?;
        let state = lift(params_of(p).and_then(|pp| State::new(pp, q, p.d0)))?;
        let handle = Box::into_raw(Box::new(PtState { state }));
        unsafe { write(out, handle, "out") }
    })
}

/// Release a handle from [`pt_state_new`]. Null is ignored.
///
/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pt_state_free(state: *mut PtState) {
    if !state.is_null() {
        // SAFETY: created by Box::into_raw in pt_state_new.
        drop(unsafe { Box::from_raw(state) });
    }
}

/// # Safety
/// `state` must be null or a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_state_energy(state: *const PtState, out: *mut f64) -> PtStatus {
    guard(|| {
        let s = unsafe { deref(state, "state") }?;
        unsafe { write(out, spectrum::energy(&s.state).value(), "out") }
    })
}

/// Closed-form ⟨r⁻²⟩.
///
/// # Safety
/// `state` must be null or a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_state_r_inv2_hft(state: *const PtState, out: *mut f64) -> PtStatus {
    guard(|| {
        let s = unsafe { deref(state, "state") }?;
        unsafe { write(out, spectrum::r_inverse_squared(&s.state), "out") }
    })
}

fn observables(s: &State, mode: PtKineticMode, rel_tol: f64) -> ptinfo::Result<StateObservables> {
    StateObservables::compute(s, &integrator(rel_tol)?, mode.into())
}

/// Quadrature-backed observables. `rel_tol <= 0` selects 1e-10.
///
/// # Safety
/// `state` must be null or a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_state_observables(
    state: *const PtState,
    mode: PtKineticMode,
    rel_tol: f64,
    out: *mut PtObservables,
) -> PtStatus {
    guard(|| {
        let s = unsafe { deref(state, "state") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let o = lift(observables(&s.state, mode, rel_tol))?;
        let u = uncertainty_report(&s.state, &o);
        let value = PtObservables {
            energy: o.energy,
            r2: o.r2,
            p2: o.p2,
            p2_printed: o.kinetic.printed,
            p2_identity: o.kinetic.identity,
            p2_derivative: o.kinetic.derivative,
            r_inv2_numeric: o.r_inv2_numeric,
            r_inv2_hft: o.r_inv2_hft,
            tanh2: o.tanh2,
            norm_constant: o.norm_constant,
            delta_r: u.delta_r,
            delta_p: u.delta_p,
            product2: u.product2,
            bound: u.bound,
            squeezed: i32::from(u.squeezed),
        };
        unsafe { write(out, value, "out") }
    })
}

/// Fisher information and the Cramér-Rao product. Requires m = 0.
///
/// # Safety
/// `state` must be null or a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_state_information(
    state: *const PtState,
    mode: PtKineticMode,
    rel_tol: f64,
    out: *mut PtInformation,
) -> PtStatus {
    guard(|| {
        let s = unsafe { deref(state, "state") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let o = lift(observables(&s.state, mode, rel_tol))?;
        let r = lift(information_report(&s.state, &o))?;
        let value = PtInformation {
            fisher_rho: r.fisher_rho,
            fisher_gamma: r.fisher_gamma,
            product: r.product,
            product_bound: r.product_bound,
            cramer_rao: r.cramer_rao,
            cramer_rao_bound: r.cramer_rao_bound,
        };
        unsafe { write(out, value, "out") }
    })
}

/// P_n^(a,b)(x).
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_jacobi(n: u32, a: f64, b: f64, x: f64, out: *mut f64) -> PtStatus {
    guard(|| {
        let v = lift(jacobi(&JacobiParams { n, a, b, x }))?;
        unsafe { write(out, v, "out") }
    })
}

/// V(r). Only the potential fields of `params` are read.
///
/// # Safety
/// `params` must be null or valid; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_potential_value(
    params: *const PtParams,
    r: f64,
    out: *mut f64,
) -> PtStatus {
    guard(|| {
        let p = lift(params_of(unsafe { deref(params, "params") }?))?;
        unsafe { write(out, potential_value(&p, r), "out") }
    })
}

/// Check the identities among the embedded tables. Returns
/// `IdentityFailure` when any check fails; the counts are written either way.
///
/// # Safety
/// `passed` and `total` must each be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_validate_fixtures(passed: *mut u32, total: *mut u32) -> PtStatus {
    let mut failed = None;
    let status = guard(|| {
        let set = lift(FixtureSet::embedded())?;
        let report = validate_identities(&set);
        let (ok, all) = report.count();
        unsafe { write(passed, ok as u32, "passed") }?;
        unsafe { write(total, all as u32, "total") }?;
        if !report.all_passed() {
            let labels: Vec<String> = report.failures().map(|c| c.label()).collect();
            failed = Some(format!("identity checks failed: {}", labels.join("; ")));
        }
        Ok(())
    });
    match (status, failed) {
        (PtStatus::Ok, Some(msg)) => {
            set_error(msg);
            PtStatus::IdentityFailure
        }
        (s, _) => s,
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    fn last_error() -> String {
        let p = pt_last_error_message();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::UnknownTable(0)), PtStatus::Fixture);
        assert_eq!(
            status_of(&Error::NoConvergence {
                panels: 1,
                value: 0.0,
                error: 1.0
            }),
            PtStatus::Numerical
        );
    }

    #[test]
    fn error_message_is_cleared_on_success() {
        let mut v = 0.0;
        let s = unsafe { pt_jacobi(2, 1.0, 1.0, 0.5, ptr::null_mut()) };
        assert_eq!(s, PtStatus::NullPointer);
        assert!(last_error().contains("out"));
        let s = unsafe { pt_jacobi(0, 1.0, 1.0, 0.5, &mut v) };
        assert_eq!(s, PtStatus::Ok);
        assert_eq!(v, 1.0);
        assert!(pt_last_error_message().is_null());
    }
}
