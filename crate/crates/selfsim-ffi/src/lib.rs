//! C ABI over `selfsim`.
//!
//! Handles are opaque pointers created by `*_new`/solver calls and released by
//! the matching `*_free`. Every fallible call returns a `SelfsimStatus`; the
//! message of the last failure on the calling thread is available through
//! `selfsim_last_error`.

use num_complex::Complex64 as C64;
use selfsim::core_model::config::{BoundaryData, ModelConfig};
use selfsim::fixedpoint::{invert_boundary, solve_fixed_point, FixedPointState};
use selfsim::painleve::{envelope_fit, integrate_profile, PainleveConfig, PhysicalProfile};
use selfsim::transform::FIT_WINDOW;
use selfsim::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelfsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NonConvergence = 4,
    Io = 5,
    Panic = 6,
    BufferTooSmall = 7,
}

/// Model configuration.
pub struct SelfsimConfig {
    inner: ModelConfig,
}

/// Converged fixed point.
pub struct SelfsimFixedPoint {
    inner: FixedPointState,
}

/// Physical-space profile samples.
pub struct SelfsimProfile {
    inner: PhysicalProfile,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SelfsimStatus {
    match e {
        _ if e.is_non_convergence() => SelfsimStatus::NonConvergence,
        Error::InvalidConfig(_) | Error::Parse(_) => SelfsimStatus::InvalidArgument,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => SelfsimStatus::Io,
        _ => SelfsimStatus::Domain,
    }
}

fn guard(f: impl FnOnce() -> Result<(), SelfsimStatus>) -> SelfsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SelfsimStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside selfsim".into());
            SelfsimStatus::Panic
        }
    }
}

fn lift<T>(r: selfsim::Result<T>) -> Result<T, SelfsimStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn nonnull<T>(p: *const T, what: &str) -> Result<(), SelfsimStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(SelfsimStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Short static name of a status code.
#[no_mangle]
pub extern "C" fn selfsim_status_name(status: SelfsimStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        SelfsimStatus::Ok => b"ok\0",
        SelfsimStatus::NullPointer => b"null pointer\0",
        SelfsimStatus::InvalidArgument => b"invalid argument\0",
        SelfsimStatus::Domain => b"domain error\0",
        SelfsimStatus::NonConvergence => b"non-convergence\0",
        SelfsimStatus::Io => b"io error\0",
        SelfsimStatus::Panic => b"panic\0",
        SelfsimStatus::BufferTooSmall => b"buffer too small\0",
    };
    s.as_ptr() as *const c_char
}

/// Message of the last failure on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn selfsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Default configuration (eps = -1).
#[no_mangle]
pub extern "C" fn selfsim_config_new() -> *mut SelfsimConfig {
    Box::into_raw(Box::new(SelfsimConfig { inner: ModelConfig::default() }))
}

/// # Safety
/// `cfg` must come from `selfsim_config_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn selfsim_config_free(cfg: *mut SelfsimConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Sets sign, cutoff, node counts and tolerance; the result is validated.
///
/// # Safety
/// `cfg` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn selfsim_config_set(
    cfg: *mut SelfsimConfig,
    epsilon: f64,
    xi_max: f64,
    n_low: usize,
    n_high: usize,
    tol: f64,
) -> SelfsimStatus {
    guard(|| {
        nonnull(cfg, "config")?;
        let c = ModelConfig { epsilon, xi_max, n_low, n_high, tol_fixed_point: tol, tol_quad: tol, ..(*cfg).inner };
        lift(c.validate())?;
        (*cfg).inner = c;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn selfsim_config_set_smallness(cfg: *mut SelfsimConfig, radius: f64) -> SelfsimStatus {
    guard(|| {
        nonnull(cfg, "config")?;
        let c = ModelConfig { smallness: radius, ..(*cfg).inner };
        lift(c.validate())?;
        (*cfg).inner = c;
        Ok(())
    })
}

/// Solves the fixed point for `A = a_re + i a_im`; `*out` receives a new handle.
///
/// # Safety
/// `cfg` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn selfsim_solve(cfg: *const SelfsimConfig, a_re: f64, a_im: f64, out: *mut *mut SelfsimFixedPoint) -> SelfsimStatus {
    guard(|| {
        nonnull(cfg, "config")?;
        nonnull(out, "out")?;
        *out = ptr::null_mut();
        let st = lift(solve_fixed_point(C64::new(a_re, a_im), &(*cfg).inner))?;
        *out = Box::into_raw(Box::new(SelfsimFixedPoint { inner: st }));
        Ok(())
    })
}

/// # Safety
/// `fp` must come from `selfsim_solve` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn selfsim_fixed_point_free(fp: *mut SelfsimFixedPoint) {
    if !fp.is_null() {
        drop(Box::from_raw(fp));
    }
}

/// Boundary data `(c, alpha)` and the iteration count.
///
/// # Safety
/// `fp` must be live; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn selfsim_fixed_point_boundary(
    fp: *const SelfsimFixedPoint,
    c: *mut f64,
    alpha: *mut f64,
    iterations: *mut usize,
) -> SelfsimStatus {
    guard(|| {
        nonnull(fp, "fixed point")?;
        nonnull(c, "c")?;
        nonnull(alpha, "alpha")?;
        nonnull(iterations, "iterations")?;
        let st = &(*fp).inner;
        *c = st.c;
        *alpha = st.alpha;
        *iterations = st.iteration;
        Ok(())
    })
}

/// `v(xi) = S_A(xi) + z(xi)`.
///
/// # Safety
/// `fp` must be live; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn selfsim_fixed_point_value(fp: *const SelfsimFixedPoint, xi: f64, re: *mut f64, im: *mut f64) -> SelfsimStatus {
    guard(|| {
        nonnull(fp, "fixed point")?;
        nonnull(re, "re")?;
        nonnull(im, "im")?;
        if !xi.is_finite() {
            set_error(format!("xi must be finite, got {xi}"));
            return Err(SelfsimStatus::InvalidArgument);
        }
        let v = (*fp).inner.v(xi);
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// `A` with the given `(c, alpha)`.
///
/// # Safety
/// `cfg` must be live; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn selfsim_invert(cfg: *const SelfsimConfig, c: f64, alpha: f64, a_re: *mut f64, a_im: *mut f64) -> SelfsimStatus {
    guard(|| {
        nonnull(cfg, "config")?;
        nonnull(a_re, "a_re")?;
        nonnull(a_im, "a_im")?;
        let cfg = &(*cfg).inner;
        let a = lift(invert_boundary(BoundaryData { c, alpha }, cfg.epsilon, cfg))?;
        *a_re = a.re;
        *a_im = a.im;
        Ok(())
    })
}

/// Airy function in the `3^{-1/3} Ai(3^{-1/3} y)` normalization and its derivative.
///
/// # Safety
/// Output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn selfsim_airy(y: f64, ai: *mut f64, ai_prime: *mut f64) -> SelfsimStatus {
    guard(|| {
        nonnull(ai, "ai")?;
        nonnull(ai_prime, "ai_prime")?;
        let a = lift(selfsim::specfun::airy(y))?;
        *ai = a.ai;
        *ai_prime = a.ai_prime;
        Ok(())
    })
}

/// Integrates the defocusing profile from `kappa Ai` down to `y_end`.
///
/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn selfsim_painleve(kappa: f64, y_end: f64, out: *mut *mut SelfsimProfile) -> SelfsimStatus {
    guard(|| {
        nonnull(out, "out")?;
        *out = ptr::null_mut();
        let cfg = PainleveConfig { kappa, y_end, ..PainleveConfig::default() };
        let p = lift(integrate_profile(&cfg))?;
        *out = Box::into_raw(Box::new(SelfsimProfile { inner: p }));
        Ok(())
    })
}

/// # Safety
/// `p` must come from `selfsim_painleve` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn selfsim_profile_free(p: *mut SelfsimProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `p` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn selfsim_profile_len(p: *const SelfsimProfile) -> usize {
    if p.is_null() {
        0
    } else {
        (*p).inner.ys.len()
    }
}

/// Copies `y`, `V`, `V'` into caller buffers of length `len`.
///
/// # Safety
/// `p` live; each buffer valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn selfsim_profile_copy(p: *const SelfsimProfile, ys: *mut f64, vs: *mut f64, dvs: *mut f64, len: usize) -> SelfsimStatus {
    guard(|| {
        nonnull(p, "profile")?;
        nonnull(ys, "ys")?;
        nonnull(vs, "vs")?;
        nonnull(dvs, "dvs")?;
        let q = &(*p).inner;
        let n = q.ys.len();
        if len < n {
            set_error(format!("buffers hold {len}, profile has {n} samples"));
            return Err(SelfsimStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(q.ys.as_ptr(), ys, n);
        ptr::copy_nonoverlapping(q.vs.as_ptr(), vs, n);
        ptr::copy_nonoverlapping(q.dvs.as_ptr(), dvs, n);
        Ok(())
    })
}

/// Envelope parameters `(rho, theta)` fitted on `[-55, -30]`.
///
/// # Safety
/// `p` live; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn selfsim_profile_fit(p: *const SelfsimProfile, rho: *mut f64, theta: *mut f64) -> SelfsimStatus {
    guard(|| {
        nonnull(p, "profile")?;
        nonnull(rho, "rho")?;
        nonnull(theta, "theta")?;
        let f = lift(envelope_fit(&(*p).inner, FIT_WINDOW))?;
        *rho = f.rho;
        *theta = f.theta;
        Ok(())
    })
}
