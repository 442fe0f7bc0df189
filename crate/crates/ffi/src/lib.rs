//! C ABI over `gkcs`.
//!
//! Models and coherent states are opaque heap handles created by
//! `gkcs_*_new` and released by the matching `gkcs_*_free`. Every fallible
//! call returns a [`GkcsStatus`] and writes its result through an out
//! pointer; on failure, [`gkcs_last_error_message`] describes the error on
//! the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gkcs::coherent::{self, CSLabel, CoherentState};
use gkcs::gk_model::GKParams;
use gkcs::specfun::{self, MPPolyParams};
use gkcs::verify::{self, VerifyOptions};
use gkcs::{Error, Result};
use num_complex::Complex64;

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GkcsStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    NonConvergence = 3,
    Overflow = 4,
    IdentityViolation = 5,
    Config = 6,
    InvalidUtf8 = 7,
    Panic = 8,
}

impl From<&Error> for GkcsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain { .. } => GkcsStatus::Domain,
            Error::NonConvergence { .. } => GkcsStatus::NonConvergence,
            Error::Overflow { .. } => GkcsStatus::Overflow,
            Error::IdentityViolation { .. } => GkcsStatus::IdentityViolation,
            Error::Config(_) => GkcsStatus::Config,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkcsComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for GkcsComplex {
    fn from(z: Complex64) -> Self {
        GkcsComplex { re: z.re, im: z.im }
    }
}

impl From<GkcsComplex> for Complex64 {
    fn from(z: GkcsComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Physical and reduced parameters of a model.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkcsParamValues {
    pub rho: f64,
    pub kappa0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub q: f64,
}

/// Opaque model handle.
pub struct GkcsModel(GKParams);

/// Opaque normalized coherent-state handle.
pub struct GkcsState(CoherentState);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).expect("NULs removed")
    });
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

enum Failure {
    Lib(Error),
    Status(GkcsStatus, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(GkcsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> std::result::Result<(), Failure>) -> GkcsStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GkcsStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            GkcsStatus::from(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_last_error(msg);
            s
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            GkcsStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T) -> std::result::Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> std::result::Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn new_model(out: *mut *mut GkcsModel, p: Result<GKParams>) -> GkcsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let handle = Box::into_raw(Box::new(GkcsModel(p?)));
        out.write(handle);
        Ok(())
    })
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn gkcs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gkcs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Model from the force constant ϱ and equilibrium length κ₀.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_model_from_physical(rho: f64, kappa0: f64, out: *mut *mut GkcsModel) -> GkcsStatus {
    new_model(out, GKParams::from_physical(rho, kappa0))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_model_from_reduced(alpha: f64, beta: f64, out: *mut *mut GkcsModel) -> GkcsStatus {
    new_model(out, GKParams::from_reduced(alpha, beta))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_model_from_gamma(gamma: f64, beta: f64, out: *mut *mut GkcsModel) -> GkcsStatus {
    new_model(out, GKParams::from_gamma(gamma, beta))
}

/// # Safety
/// `model` must be NULL or a handle from a `gkcs_model_from_*` call not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gkcs_model_free(model: *mut GkcsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_model_values(model: *const GkcsModel, out: *mut GkcsParamValues) -> GkcsStatus {
    guard(|| {
        let p = deref(model, "model")?.0;
        write(
            out,
            GkcsParamValues {
                rho: p.rho,
                kappa0: p.kappa0,
                alpha: p.alpha,
                beta: p.beta,
                gamma: p.gamma,
                q: p.q,
            },
        )
    })
}

/// Reduced eigenvalue λ_m = 4β(m + γ/2).
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_eigenvalue(model: *const GkcsModel, m: usize, out: *mut f64) -> GkcsStatus {
    guard(|| write(out, deref(model, "model")?.0.eigenvalue(m)))
}

/// Normalized eigenfunction ψ_m(ξ).
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_eigenfunction(model: *const GkcsModel, m: usize, xi: f64, out: *mut f64) -> GkcsStatus {
    guard(|| write(out, deref(model, "model")?.0.eigenfunction(m, xi)?))
}

/// Meixner-Pollaczek polynomial P_m^(λ)(x; θ) by recurrence.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_mp_poly(m: usize, lambda: f64, theta: f64, x: f64, out: *mut f64) -> GkcsStatus {
    guard(|| write(out, specfun::mp_poly(m, MPPolyParams::new(lambda, theta)?, x)))
}

/// ₁F₁(a; c; z).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_hyp1f1(
    a: GkcsComplex,
    c: GkcsComplex,
    z: GkcsComplex,
    out: *mut GkcsComplex,
) -> GkcsStatus {
    guard(|| {
        let v = specfun::hyp1f1(a.into(), c.into(), z.into())?.require("hyp1f1")?;
        write(out, v.value.into())
    })
}

/// ₂F₁(a, b; c; z).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_hyp2f1(
    a: GkcsComplex,
    b: GkcsComplex,
    c: GkcsComplex,
    z: GkcsComplex,
    out: *mut GkcsComplex,
) -> GkcsStatus {
    guard(|| {
        let v = specfun::hyp2f1(a.into(), b.into(), c.into(), z.into())?.require("hyp2f1")?;
        write(out, v.value.into())
    })
}

/// Normalized coherent state labelled by (x, θ, ε) on `model`.
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_state_new(
    model: *const GkcsModel,
    theta: f64,
    epsilon: f64,
    x: f64,
    out: *mut *mut GkcsState,
) -> GkcsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let label = CSLabel::new(deref(model, "model")?.0, theta, epsilon, x)?;
        out.write(Box::into_raw(Box::new(GkcsState(CoherentState::new(label)?))));
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a handle from `gkcs_state_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gkcs_state_free(state: *mut GkcsState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Normalization factor N(x) of the state.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_state_normalization(state: *const GkcsState, out: *mut f64) -> GkcsStatus {
    guard(|| write(out, deref(state, "state")?.0.norm()))
}

/// ⟨ξ|x, ε⟩ from the closed form.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_state_wavefunction(
    state: *const GkcsState,
    xi: f64,
    out: *mut GkcsComplex,
) -> GkcsStatus {
    guard(|| write(out, deref(state, "state")?.0.wavefunction(xi)?.into()))
}

/// ⟨ξ|x, ε⟩ from the truncated eigenfunction superposition.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_state_wavefunction_series(
    state: *const GkcsState,
    xi: f64,
    tol: f64,
    out: *mut GkcsComplex,
) -> GkcsStatus {
    guard(|| {
        let label = deref(state, "state")?.0.label();
        let v = coherent::cs_wavefunction_series(label, xi, tol)?.require("cs_wavefunction_series")?;
        write(out, v.value.into())
    })
}

/// ∫₀^∞ |⟨ξ|x, ε⟩|² dξ by quadrature; 1 up to `tol`.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_state_l2_norm_sq(state: *const GkcsState, tol: f64, out: *mut f64) -> GkcsStatus {
    guard(|| write(out, deref(state, "state")?.0.l2_norm_sq(tol)?))
}

/// Overlap ⟨a|b⟩ of two normalized states on the same model.
///
/// # Safety
/// Both handles must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_state_overlap(
    a: *const GkcsState,
    b: *const GkcsState,
    out: *mut GkcsComplex,
) -> GkcsStatus {
    guard(|| {
        let (a, b) = (&deref(a, "a")?.0, &deref(b, "b")?.0);
        let v = coherent::overlap_with_norms(a.label(), b.label(), a.norm(), b.norm())?;
        write(out, v.into())
    })
}

/// Density N(x)Υ(x) of the labelling measure at the state's label.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_state_measure_density(state: *const GkcsState, out: *mut f64) -> GkcsStatus {
    guard(|| write(out, coherent::measure_density(deref(state, "state")?.0.label())?))
}

/// Runs one verification suite, or all of them when `suite` is NULL, and
/// returns the reports as a JSON array in `*out_json` (release with
/// [`gkcs_string_free`]) and the number of failed invariants in `*failed`.
///
/// # Safety
/// `suite` must be NULL or a NUL-terminated string; outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkcs_verify(
    suite: *const c_char,
    out_json: *mut *mut c_char,
    failed: *mut usize,
) -> GkcsStatus {
    guard(|| {
        if out_json.is_null() || failed.is_null() {
            return Err(null("output pointer"));
        }
        let opts = VerifyOptions::default();
        let reports = if suite.is_null() {
            verify::run_all(&opts)?
        } else {
            let name = CStr::from_ptr(suite)
                .to_str()
                .map_err(|_| Failure::Status(GkcsStatus::InvalidUtf8, "suite name is not UTF-8".into()))?;
            verify::run_suite(name, &opts)?
        };
        let json = serde_json::to_string(&reports).expect("reports serialize");
        failed.write(reports.iter().filter(|r| !r.passed).count());
        out_json.write(CString::new(json).expect("JSON has no NUL").into_raw());
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gkcs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
