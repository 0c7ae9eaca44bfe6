//! C ABI over `sbs_monitor`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` /
//! `*_default` and released with the matching `*_free`. Every fallible call
//! returns an [`SbsStatus`]; on failure the message is kept per thread and
//! can be fetched with [`sbs_last_error_message`]. Panics never unwind into
//! the caller.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use sbs_monitor::config::RunConfig;
use sbs_monitor::discrimination::majority_success;
use sbs_monitor::runner::{run, RunError, Scenario};
use sbs_monitor::spin_model::{decoherence_factor, macrofraction_fidelity, time_scales, SpinParams};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SbsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Config = 4,
    Io = 5,
    Panic = 6,
}

/// Ordered set of environment spins.
pub struct SbsSpinSet {
    spins: Vec<SpinParams>,
}

/// Run configuration.
pub struct SbsConfig {
    inner: RunConfig,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SbsTimeScales {
    pub t_b: f64,
    pub t_d: f64,
    pub ratio_sq: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(SbsStatus, String);

impl From<sbs_monitor::Error> for Failure {
    fn from(e: sbs_monitor::Error) -> Self {
        let status = match e {
            sbs_monitor::Error::InvalidParameter { .. } => SbsStatus::InvalidArgument,
            _ => SbsStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        let status = match e {
            RunError::Config(_) => SbsStatus::Config,
            RunError::Io { .. } => SbsStatus::Io,
            RunError::Numerics(_) => SbsStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SbsStatus::NullPointer, format!("{what} is null"))
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SbsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SbsStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            SbsStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: caller guarantees `out` points to writable storage for a T
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    // SAFETY: caller passes a NUL-terminated string that outlives the call
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| Failure(SbsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn spins<'a>(set: *const SbsSpinSet) -> Result<&'a [SpinParams], Failure> {
    // SAFETY: non-null handles come from sbs_spin_set_new
    unsafe { set.as_ref() }
        .map(|s| s.spins.as_slice())
        .ok_or_else(|| null("spin set"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sbs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Length in bytes of the last error message on this thread, without the NUL.
#[no_mangle]
pub extern "C" fn sbs_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message into `buf` (truncated, always NUL-terminated).
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sbs_last_error_message(buf: *mut c_char, len: usize) -> SbsStatus {
    if buf.is_null() || len == 0 {
        return SbsStatus::NullPointer;
    }
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let n = msg.len().min(len - 1);
        // SAFETY: n + 1 <= len bytes are writable per the contract
        unsafe {
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
    });
    SbsStatus::Ok
}

#[no_mangle]
pub extern "C" fn sbs_spin_set_new() -> *mut SbsSpinSet {
    Box::into_raw(Box::new(SbsSpinSet { spins: Vec::new() }))
}

/// # Safety
/// `set` must come from [`sbs_spin_set_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sbs_spin_set_free(set: *mut SbsSpinSet) {
    if !set.is_null() {
        // SAFETY: ownership returns from the caller
        drop(unsafe { Box::from_raw(set) });
    }
}

/// Appends a spin with Euler angles, larger eigenvalue `lambda` and coupling `g`.
///
/// # Safety
/// `set` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sbs_spin_set_push(
    set: *mut SbsSpinSet,
    alpha: f64,
    beta: f64,
    gamma: f64,
    lambda: f64,
    g: f64,
) -> SbsStatus {
    guard(|| {
        // SAFETY: live handle per the contract
        let set = unsafe { set.as_mut() }.ok_or_else(|| null("spin set"))?;
        set.spins.push(SpinParams::new(alpha, beta, gamma, lambda, g)?);
        Ok(())
    })
}

/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sbs_spin_set_len(set: *const SbsSpinSet, out: *mut usize) -> SbsStatus {
    guard(|| unsafe { write(out, spins(set)?.len()) })
}

/// Collective decoherence factor of the set at time `t`.
///
/// # Safety
/// `set` must be a live handle; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn sbs_decoherence_factor(
    set: *const SbsSpinSet,
    t: f64,
    re: *mut f64,
    im: *mut f64,
) -> SbsStatus {
    guard(|| {
        if !t.is_finite() {
            return Err(Failure(SbsStatus::InvalidArgument, format!("t = {t} is not finite")));
        }
        let z = decoherence_factor(unsafe { spins(set)? }, t);
        unsafe {
            write(re, z.re)?;
            write(im, z.im)
        }
    })
}

/// Fidelity between the two branch states of the set at time `t`.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sbs_macrofraction_fidelity(set: *const SbsSpinSet, t: f64, out: *mut f64) -> SbsStatus {
    guard(|| {
        if !t.is_finite() {
            return Err(Failure(SbsStatus::InvalidArgument, format!("t = {t} is not finite")));
        }
        let b = macrofraction_fidelity(unsafe { spins(set)? }, t);
        unsafe { write(out, b) }
    })
}

/// Orthogonalization and decoherence times for `n_total` spins,
/// macrofraction size `n_m`, observed fraction `f` and mean squared coupling.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbs_time_scales(
    n_total: usize,
    n_m: usize,
    f: f64,
    g2bar: f64,
    out: *mut SbsTimeScales,
) -> SbsStatus {
    guard(|| {
        let ts = time_scales(n_total, n_m, f, g2bar)?;
        unsafe {
            write(
                out,
                SbsTimeScales {
                    t_b: ts.t_b,
                    t_d: ts.t_d,
                    ratio_sq: ts.ratio_sq,
                },
            )
        }
    })
}

/// Probability that a strict majority of `n` independent trials succeeds.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbs_majority_success(n: u64, p: f64, out: *mut f64) -> SbsStatus {
    guard(|| unsafe { write(out, majority_success(n, p)?) })
}

/// Default configuration; `*out` receives a new handle.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbs_config_default(out: *mut *mut SbsConfig) -> SbsStatus {
    guard(|| unsafe {
        write(
            out,
            Box::into_raw(Box::new(SbsConfig {
                inner: RunConfig::default(),
            })),
        )
    })
}

/// Parses and validates a TOML configuration.
///
/// # Safety
/// `toml` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sbs_config_from_toml(toml: *const c_char, out: *mut *mut SbsConfig) -> SbsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let text = unsafe { str_arg(toml, "toml")? };
        let inner = RunConfig::from_toml(text).map_err(|e| Failure(SbsStatus::Config, e.to_string()))?;
        inner
            .validate()
            .map_err(|e| Failure(SbsStatus::Config, e.to_string()))?;
        unsafe { write(out, Box::into_raw(Box::new(SbsConfig { inner }))) }
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sbs_config_set_seed(config: *mut SbsConfig, seed: u64) -> SbsStatus {
    guard(|| {
        unsafe { config.as_mut() }.ok_or_else(|| null("config"))?.inner.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sbs_config_set_samples(config: *mut SbsConfig, samples: usize) -> SbsStatus {
    guard(|| {
        if samples == 0 {
            return Err(Failure(SbsStatus::Config, "samples: must be at least 1".into()));
        }
        unsafe { config.as_mut() }.ok_or_else(|| null("config"))?.inner.samples = samples;
        Ok(())
    })
}

/// # Safety
/// `config` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sbs_config_free(config: *mut SbsConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

/// Runs a scenario (`fig1`, `fig2`, `timescales`, `discrimination` or
/// `verify`) into `out_dir`. `SBS_STATUS_OK` means the run completed; its
/// process-style exit code (0, 2 or 3) lands in `*exit_code`.
///
/// # Safety
/// `config` must be a live handle, the strings NUL-terminated and
/// `exit_code` writable.
#[no_mangle]
pub unsafe extern "C" fn sbs_run_scenario(
    config: *const SbsConfig,
    scenario: *const c_char,
    out_dir: *const c_char,
    exit_code: *mut i32,
) -> SbsStatus {
    guard(|| {
        if exit_code.is_null() {
            return Err(null("exit_code"));
        }
        let config = unsafe { config.as_ref() }.ok_or_else(|| null("config"))?;
        let name = unsafe { str_arg(scenario, "scenario")? };
        let scenario: Scenario = name
            .parse()
            .map_err(|_| Failure(SbsStatus::InvalidArgument, format!("unknown scenario '{name}'")))?;
        let dir = unsafe { str_arg(out_dir, "out_dir")? };
        let outcome = run(scenario, &config.inner, Path::new(dir))?;
        unsafe { write(exit_code, outcome.exit as i32) }
    })
}
