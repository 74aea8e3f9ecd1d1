//! C ABI over the library: opaque experiment handles, integer status codes,
//! and a thread-local last-error message. Every entry point catches unwinds
//! at the boundary and reports them as a status instead of aborting the
//! caller. The generated header lands in `include/bayesmodes.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use bayes_modes::config::{load_config, ExperimentConfig};
use bayes_modes::experiment::{run_experiment, RunError};
use bayes_modes::models::{
    point_source_field, stekloff_closest, ModelError, PointSourceModel, StekloffModel,
};
use bayes_modes::specfun::{bessel_j, bessel_y0, hankel1_0};

/// Status code returned by every fallible entry point. On anything other
/// than `Ok`, `bm_last_error()` carries a message.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BmStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument failed validation: bad UTF-8, non-finite value, or a
    /// value outside the function's domain.
    InvalidArgument = 2,
    /// The configuration file failed to load or validate.
    Config = 3,
    /// The run failed after validation: model evaluation, data resolution,
    /// or artifact I/O.
    Runtime = 4,
    /// The requested result does not exist yet (e.g. report before run).
    NoReport = 5,
    /// A panic was caught at the boundary. Memory is intact but the handle
    /// involved should be freed, not reused.
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: BmStatus, message: String) -> BmStatus {
    let c = CString::new(message).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
    status
}

/// Message from the most recent failing call on this thread, or null if no
/// call has failed yet.
///
/// The pointer stays valid until the next failing call on the same thread;
/// copy the string out if it must outlive that.
#[no_mangle]
pub extern "C" fn bm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(c) => c.as_ptr(),
        None => ptr::null(),
    })
}

/// Run a closure with panics converted to `BmStatus::Panic`.
fn guarded(f: impl FnOnce() -> BmStatus) -> BmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(BmStatus::Panic, format!("panic: {msg}"))
        }
    }
}

/// Null-check an output pointer.
fn need<T>(p: *mut T, name: &str) -> Result<(), BmStatus> {
    if p.is_null() {
        Err(fail(BmStatus::NullArgument, format!("{name} must not be null")))
    } else {
        Ok(())
    }
}

/// Borrow a UTF-8 string argument.
unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, BmStatus> {
    if p.is_null() {
        return Err(fail(BmStatus::NullArgument, format!("{name} must not be null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(BmStatus::InvalidArgument, format!("{name} is not valid UTF-8")))
}

fn model_error(e: ModelError) -> BmStatus {
    let status = match e {
        ModelError::Dimension { .. }
        | ModelError::Domain(_)
        | ModelError::Observation(_)
        | ModelError::SpecFun(_) => BmStatus::InvalidArgument,
        ModelError::NearDirichlet { .. } | ModelError::SourceAtReceiver => BmStatus::Runtime,
    };
    fail(status, e.to_string())
}

fn run_error(e: RunError) -> BmStatus {
    let status = if e.exit_code() == 1 { BmStatus::Config } else { BmStatus::Runtime };
    fail(status, e.to_string())
}

/// Bessel function of the first kind, integer order.
///
/// # Safety
/// `out` must be null or point to a writable f64; null is reported as
/// `BM_STATUS_NULL_ARGUMENT`.
#[no_mangle]
pub unsafe extern "C" fn bm_bessel_j(order: u32, x: f64, out: *mut f64) -> BmStatus {
    guarded(|| {
        if let Err(s) = need(out, "out") {
            return s;
        }
        match bessel_j(order, x) {
            Ok(v) => {
                *out = v;
                BmStatus::Ok
            }
            Err(e) => fail(BmStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Bessel function of the second kind, order zero. Errors for x ≤ 0.
///
/// # Safety
/// `out` must be null or point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn bm_bessel_y0(x: f64, out: *mut f64) -> BmStatus {
    guarded(|| {
        if let Err(s) = need(out, "out") {
            return s;
        }
        match bessel_y0(x) {
            Ok(v) => {
                *out = v;
                BmStatus::Ok
            }
            Err(e) => fail(BmStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Outgoing Hankel function of order zero, H₀⁽¹⁾(x) = J₀(x) + i·Y₀(x).
///
/// # Safety
/// `out_re` and `out_im` must be null or point to writable f64s.
#[no_mangle]
pub unsafe extern "C" fn bm_hankel1_0(x: f64, out_re: *mut f64, out_im: *mut f64) -> BmStatus {
    guarded(|| {
        if let Err(s) = need(out_re, "out_re").and_then(|_| need(out_im, "out_im")) {
            return s;
        }
        match hankel1_0(x) {
            Ok(h) => {
                *out_re = h.re;
                *out_im = h.im;
                BmStatus::Ok
            }
            Err(e) => fail(BmStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Boundary eigenvalue closest to `target` for a unit disk with wavenumber
/// `wavenumber` and index of refraction `refraction`; ties go to the
/// smaller eigenvalue. `out_order` may be null if the angular order is not
/// wanted.
///
/// # Safety
/// `out_value` must be null or point to a writable f64; `out_order` must be
/// null or point to a writable u32.
#[no_mangle]
pub unsafe extern "C" fn bm_stekloff_closest(
    wavenumber: f64,
    target: f64,
    refraction: f64,
    out_value: *mut f64,
    out_order: *mut u32,
) -> BmStatus {
    guarded(|| {
        if let Err(s) = need(out_value, "out_value") {
            return s;
        }
        if !(wavenumber > 0.0 && wavenumber.is_finite()) || !target.is_finite() {
            return fail(
                BmStatus::InvalidArgument,
                format!("wavenumber must be positive and target finite, got k={wavenumber}, target={target}"),
            );
        }
        let model = StekloffModel::new(wavenumber, target);
        match stekloff_closest(&model, refraction) {
            Ok(ev) => {
                *out_value = ev.value;
                if !out_order.is_null() {
                    *out_order = ev.order;
                }
                BmStatus::Ok
            }
            Err(e) => model_error(e),
        }
    })
}

/// Field of a point source at (`source_x`, `source_y`) observed by a
/// receiver at (`receiver_x`, `receiver_y`): (i/4)·H₀⁽¹⁾(k·distance).
///
/// # Safety
/// `out_re` and `out_im` must be null or point to writable f64s.
#[no_mangle]
pub unsafe extern "C" fn bm_point_source_field(
    receiver_x: f64,
    receiver_y: f64,
    wavenumber: f64,
    source_x: f64,
    source_y: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> BmStatus {
    guarded(|| {
        if let Err(s) = need(out_re, "out_re").and_then(|_| need(out_im, "out_im")) {
            return s;
        }
        if !(wavenumber > 0.0 && wavenumber.is_finite())
            || !(receiver_x.is_finite() && receiver_y.is_finite())
        {
            return fail(
                BmStatus::InvalidArgument,
                "wavenumber must be positive and receiver coordinates finite".into(),
            );
        }
        let model = PointSourceModel::new([receiver_x, receiver_y], wavenumber);
        match point_source_field(&model, [source_x, source_y]) {
            Ok(v) => {
                *out_re = v.re;
                *out_im = v.im;
                BmStatus::Ok
            }
            Err(e) => model_error(e),
        }
    })
}

/// Opaque experiment handle: a validated configuration plus the report of
/// its most recent run.
pub struct BmExperiment {
    config: ExperimentConfig,
    report_json: Option<CString>,
}

/// Load and validate a configuration file. On success `*out` owns a new
/// handle that must be released with `bm_experiment_free`.
///
/// # Safety
/// `path` must be null or a NUL-terminated string; `out` must be null or
/// point to a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn bm_experiment_load(
    path: *const c_char,
    out: *mut *mut BmExperiment,
) -> BmStatus {
    guarded(|| {
        if let Err(s) = need(out, "out") {
            return s;
        }
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match load_config(path) {
            Ok(config) => {
                let handle = Box::new(BmExperiment { config, report_json: None });
                *out = Box::into_raw(handle);
                BmStatus::Ok
            }
            Err(e) => fail(BmStatus::Config, e.to_string()),
        }
    })
}

/// Override the sampler seed for subsequent runs.
///
/// # Safety
/// `exp` must be null or a live handle from `bm_experiment_load`.
#[no_mangle]
pub unsafe extern "C" fn bm_experiment_set_seed(exp: *mut BmExperiment, seed: u64) -> BmStatus {
    guarded(|| {
        if let Err(s) = need(exp, "exp") {
            return s;
        }
        (*exp).config.seed = seed;
        BmStatus::Ok
    })
}

/// Override the artifact directory for subsequent runs.
///
/// # Safety
/// `exp` must be null or a live handle; `dir` must be null or a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bm_experiment_set_output_dir(
    exp: *mut BmExperiment,
    dir: *const c_char,
) -> BmStatus {
    guarded(|| {
        if let Err(s) = need(exp, "exp") {
            return s;
        }
        let dir = match str_arg(dir, "dir") {
            Ok(d) => d,
            Err(s) => return s,
        };
        (*exp).config.output_dir = Some(PathBuf::from(dir));
        BmStatus::Ok
    })
}

/// Run the experiment: sample the chain, estimate, and write `chain.csv`,
/// `histogram.csv`, and `report.json` into the configured output directory
/// (default `out`). On success the report is retained on the handle for
/// `bm_experiment_report_json`.
///
/// # Safety
/// `exp` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bm_experiment_run(exp: *mut BmExperiment) -> BmStatus {
    guarded(|| {
        if let Err(s) = need(exp, "exp") {
            return s;
        }
        let handle = &mut *exp;
        let out_dir = handle.config.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
        match run_experiment(&handle.config, &out_dir, 1) {
            Ok(outcomes) => {
                let json = outcomes[0].report.to_json_pretty();
                handle.report_json =
                    Some(CString::new(json).expect("report JSON has no NUL bytes"));
                BmStatus::Ok
            }
            Err(e) => run_error(e),
        }
    })
}

/// JSON report of the handle's most recent run, or null if it has not run
/// yet (status `BM_STATUS_NO_REPORT` via `bm_last_error`).
///
/// The pointer is owned by the handle and stays valid until the next
/// `bm_experiment_run` on it or `bm_experiment_free`.
///
/// # Safety
/// `exp` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bm_experiment_report_json(exp: *const BmExperiment) -> *const c_char {
    if exp.is_null() {
        fail(BmStatus::NullArgument, "exp must not be null".into());
        return ptr::null();
    }
    match &(*exp).report_json {
        Some(json) => json.as_ptr(),
        None => {
            fail(BmStatus::NoReport, "experiment has not been run yet".into());
            ptr::null()
        }
    }
}

/// Release a handle. Null is a no-op.
///
/// # Safety
/// `exp` must be null or a handle from `bm_experiment_load` that has not
/// been freed before; any report pointer taken from it is invalid after
/// this call.
#[no_mangle]
pub unsafe extern "C" fn bm_experiment_free(exp: *mut BmExperiment) {
    if !exp.is_null() {
        drop(Box::from_raw(exp));
    }
}
