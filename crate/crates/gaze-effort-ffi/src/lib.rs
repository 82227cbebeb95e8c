//! C ABI for the gaze-effort library.
//!
//! Handles are opaque pointers created and destroyed by this library; every
//! fallible call returns a [`GeStatus`] and leaves a human-readable message
//! for [`ge_last_error_message`] on failure. All functions are
//! panic-safe: a caught panic returns `GE_STATUS_PANIC`.
//!
//! The C header is generated into `include/gaze_effort.h` by the build
//! script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use gaze_effort::error::Error;
use gaze_effort::io::Config;
use gaze_effort::measures::{Metric, MetricsRow};
use gaze_effort::model::{validate_trial, Trial};
use gaze_effort::pipeline;
use gaze_effort::synth;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    Io = 3,
    /// Malformed input file; the message carries the line number.
    Parse = 4,
    SchemaVersion = 5,
    Config = 6,
    EmptyInput = 7,
    /// The data is degenerate for the requested quantity (zero variance,
    /// zero flow, constant speed).
    Degenerate = 8,
    /// A required channel (AOI labels, pupil, speed) is absent.
    MissingData = 9,
    /// Too few samples, fixations, or rows.
    InsufficientData = 10,
    /// A synthetic scenario is infeasible.
    Infeasible = 11,
    /// Internal computation error.
    Compute = 12,
    /// A panic was caught at the boundary.
    Panic = 13,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> GeStatus {
    match err {
        Error::Io(_) => GeStatus::Io,
        Error::Parse { .. } => GeStatus::Parse,
        Error::SchemaVersion { .. } => GeStatus::SchemaVersion,
        Error::Config(_) => GeStatus::Config,
        Error::EmptyInput | Error::EmptySequence => GeStatus::EmptyInput,
        Error::DegenerateDuration(_)
        | Error::ZeroDepth(_)
        | Error::ZeroTotalFlow
        | Error::ZeroTotalImportance
        | Error::ZeroVariance(_) => GeStatus::Degenerate,
        Error::MissingAoiLabels | Error::MissingSpeed | Error::NoValidPupilSamples => {
            GeStatus::MissingData
        }
        Error::InsufficientSamples { .. }
        | Error::InsufficientData { .. }
        | Error::FewerThanTwoFixations(_) => GeStatus::InsufficientData,
        Error::InfeasibleSchedule(_) => GeStatus::Infeasible,
        Error::SupportMismatch | Error::InvalidDistribution(_) | Error::LengthMismatch(..) => {
            GeStatus::Compute
        }
    }
}

fn fail(err: Error) -> GeStatus {
    set_error(&err.to_string());
    status_of(&err)
}

fn guard(body: impl FnOnce() -> GeStatus) -> GeStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(&msg);
            GeStatus::Panic
        }
    }
}

unsafe fn utf8_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, GeStatus> {
    if ptr.is_null() {
        set_error(&format!("{name} is null"));
        return Err(GeStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(&format!("{name} is not valid UTF-8"));
        GeStatus::InvalidUtf8
    })
}

/// Opaque pipeline configuration handle.
pub struct GeConfig(Config);
/// Opaque trial handle.
pub struct GeTrial(Trial);
/// Opaque per-trial metrics handle.
pub struct GeMetrics(MetricsRow);

/// Which metric to read from a [`GeMetrics`] handle.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeMetricField {
    CemVi = 0,
    CemIq = 1,
    Sge = 2,
    EntropyRate = 3,
    CheckRate = 4,
    FixationRate = 5,
    PupilSizeChange = 6,
    DrivingPerformance = 7,
    SrjsdF = 8,
    SrjsdFs = 9,
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn ge_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ge_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Default configuration. Never fails.
#[no_mangle]
pub extern "C" fn ge_config_default() -> *mut GeConfig {
    Box::into_raw(Box::new(GeConfig(Config::default())))
}

/// Loads a configuration file.
///
/// # Safety
/// `path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ge_config_load(path: *const c_char, out: *mut *mut GeConfig) -> GeStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return GeStatus::NullArgument;
        }
        let path = match utf8_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match gaze_effort::io::load_config(std::path::Path::new(path)) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(GeConfig(cfg)));
                GeStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `config` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ge_config_free(config: *mut GeConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Parses a gaze log into a trial handle.
///
/// # Safety
/// `path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ge_trial_load(path: *const c_char, out: *mut *mut GeTrial) -> GeStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return GeStatus::NullArgument;
        }
        let path = match utf8_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match gaze_effort::io::parse_trial(std::path::Path::new(path)) {
            Ok(trial) => {
                *out = Box::into_raw(Box::new(GeTrial(trial)));
                GeStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `trial` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ge_trial_free(trial: *mut GeTrial) {
    if !trial.is_null() {
        drop(Box::from_raw(trial));
    }
}

/// Number of raw samples in a trial; 0 for a null handle.
///
/// # Safety
/// `trial` must be a live handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn ge_trial_sample_count(trial: *const GeTrial) -> usize {
    if trial.is_null() {
        return 0;
    }
    (*trial).0.samples.len()
}

/// Fixations detected so far (populated by `ge_metrics_compute`).
///
/// # Safety
/// `trial` must be a live handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn ge_trial_fixation_count(trial: *const GeTrial) -> usize {
    if trial.is_null() {
        return 0;
    }
    (*trial).0.fixations.len()
}

/// Number of invariant violations in a trial; 0 for a well-formed trial.
///
/// # Safety
/// `trial` must be a live handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn ge_trial_validate(trial: *const GeTrial) -> usize {
    if trial.is_null() {
        return 0;
    }
    validate_trial(&(*trial).0).len()
}

/// Detects fixations, runs the geometry pass, and computes all per-trial
/// metrics. `config` may be null for defaults.
///
/// # Safety
/// Handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ge_metrics_compute(
    trial: *mut GeTrial,
    config: *const GeConfig,
    out: *mut *mut GeMetrics,
) -> GeStatus {
    guard(|| {
        if trial.is_null() || out.is_null() {
            set_error("trial or out is null");
            return GeStatus::NullArgument;
        }
        let default_cfg;
        let cfg = if config.is_null() {
            default_cfg = Config::default();
            &default_cfg
        } else {
            &(*config).0
        };
        match pipeline::process_trial(&mut (*trial).0, cfg) {
            Ok(row) => {
                *out = Box::into_raw(Box::new(GeMetrics(row)));
                GeStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `metrics` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ge_metrics_free(metrics: *mut GeMetrics) {
    if !metrics.is_null() {
        drop(Box::from_raw(metrics));
    }
}

/// Reads one metric. Returns `Ok` and writes the value; `Degenerate` and
/// writes +infinity for a tagged-infinite metric; `MissingData` (value
/// untouched) for a tagged-missing one, with the reason in the last error.
///
/// # Safety
/// `metrics` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ge_metrics_get(
    metrics: *const GeMetrics,
    field: GeMetricField,
    out: *mut f64,
) -> GeStatus {
    guard(|| {
        if metrics.is_null() || out.is_null() {
            set_error("metrics or out is null");
            return GeStatus::NullArgument;
        }
        let row = &(*metrics).0;
        let metric = match field {
            GeMetricField::CemVi => &row.cem_vi,
            GeMetricField::CemIq => &row.cem_iq,
            GeMetricField::Sge => &row.sge,
            GeMetricField::EntropyRate => &row.entropy_rate,
            GeMetricField::CheckRate => &row.check_rate,
            GeMetricField::FixationRate => &row.fixation_rate,
            GeMetricField::PupilSizeChange => &row.pupil_size_change,
            GeMetricField::DrivingPerformance => &row.driving_performance,
            GeMetricField::SrjsdF => &row.srjsd_f,
            GeMetricField::SrjsdFs => &row.srjsd_fs,
        };
        match metric {
            Metric::Value(v) => {
                *out = *v;
                GeStatus::Ok
            }
            Metric::Infinite => {
                *out = f64::INFINITY;
                set_error("degenerate: infinite value");
                GeStatus::Degenerate
            }
            Metric::Missing(reason) => {
                set_error(reason);
                GeStatus::MissingData
            }
        }
    })
}

/// Writes the trial id into `buf` (NUL-terminated, truncating). Returns the
/// full length of the id in bytes, excluding the terminator.
///
/// # Safety
/// `metrics` must be a live handle; `buf` must hold `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ge_metrics_trial_id(
    metrics: *const GeMetrics,
    buf: *mut c_char,
    len: usize,
) -> usize {
    if metrics.is_null() {
        return 0;
    }
    let id = (*metrics).0.trial_id.as_bytes();
    if !buf.is_null() && len > 0 {
        let n = id.len().min(len - 1);
        ptr::copy_nonoverlapping(id.as_ptr() as *const c_char, buf, n);
        *buf.add(n) = 0;
    }
    id.len()
}

/// Runs the full pipeline over trial files and writes `metrics.csv` plus,
/// when enough complete rows exist, `report.csv` and `report.md` into
/// `out_dir`. `config` may be null for defaults.
///
/// # Safety
/// `paths` must point to `n_paths` valid C strings; `out_dir` must be a
/// valid C string.
#[no_mangle]
pub unsafe extern "C" fn ge_run_report(
    paths: *const *const c_char,
    n_paths: usize,
    config: *const GeConfig,
    out_dir: *const c_char,
    strict: bool,
) -> GeStatus {
    guard(|| {
        if paths.is_null() {
            set_error("paths is null");
            return GeStatus::NullArgument;
        }
        let out_dir = match utf8_arg(out_dir, "out_dir") {
            Ok(p) => PathBuf::from(p),
            Err(s) => return s,
        };
        let mut inputs = Vec::with_capacity(n_paths);
        for i in 0..n_paths {
            match utf8_arg(*paths.add(i), "paths entry") {
                Ok(p) => inputs.push(PathBuf::from(p)),
                Err(s) => return s,
            }
        }
        let default_cfg;
        let cfg = if config.is_null() {
            default_cfg = Config::default();
            &default_cfg
        } else {
            &(*config).0
        };
        match pipeline::run_pipeline(&inputs, cfg, strict)
            .and_then(|out| pipeline::write_outputs(&out, &out_dir))
        {
            Ok(_) => GeStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Generates a synthetic corpus plus its expectation ledger. `preset` is
/// one of "balanced", "concentrated", "mixed".
///
/// # Safety
/// `preset` and `out_dir` must be valid C strings.
#[no_mangle]
pub unsafe extern "C" fn ge_simulate_corpus(
    preset: *const c_char,
    n_trials: usize,
    seed: u64,
    jitter_deg: f64,
    out_dir: *const c_char,
    config: *const GeConfig,
) -> GeStatus {
    guard(|| {
        let preset = match utf8_arg(preset, "preset") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let out_dir = match utf8_arg(out_dir, "out_dir") {
            Ok(p) => PathBuf::from(p),
            Err(s) => return s,
        };
        let preset: synth::Preset = match preset.parse() {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        let default_cfg;
        let cfg = if config.is_null() {
            default_cfg = Config::default();
            &default_cfg
        } else {
            &(*config).0
        };
        match synth::make_corpus(preset, n_trials, seed, jitter_deg, &out_dir, &cfg.measures) {
            Ok(_) => GeStatus::Ok,
            Err(e) => fail(e),
        }
    })
}
