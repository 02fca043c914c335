//! C interface to the Port of Mars simulator.
//!
//! Games are opaque `PomRun` handles. Every function returns a `PomStatus`;
//! on failure `pom_last_error` describes what went wrong on this thread.
//! Strings handed out must be released with `pom_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use pom_core::experiments::{build_gateway, preset, run_one, Backend, ExperimentError};
use pom_core::gateway::GatewayPolicy;
use pom_core::metrics::{gini, welch_p, RunMetrics};
use pom_core::orchestrator::{replay, RecordError, ReplayError, RunRecord};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PomStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Backend = 4,
    Mismatch = 5,
    Io = 6,
    Internal = 7,
}

/// One finished (or aborted) game and its log.
pub struct PomRun {
    record: RunRecord,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

struct Fail(PomStatus, String);

impl From<ExperimentError> for Fail {
    fn from(e: ExperimentError) -> Fail {
        let status = match &e {
            ExperimentError::Backend(_) => PomStatus::Backend,
            ExperimentError::Io { .. } => PomStatus::Io,
            ExperimentError::Record(RecordError::Io { .. }) => PomStatus::Io,
            ExperimentError::Orchestrator(_) | ExperimentError::Aggregate(_) => PomStatus::Internal,
            _ => PomStatus::InvalidInput,
        };
        Fail(status, e.to_string())
    }
}

impl From<RecordError> for Fail {
    fn from(e: RecordError) -> Fail {
        let status = match &e {
            RecordError::Io { .. } => PomStatus::Io,
            RecordError::Format { .. } => PomStatus::InvalidInput,
            RecordError::ChainMismatch { .. } => PomStatus::Mismatch,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PomStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PomStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PomStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(PomStatus::NullArgument, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(PomStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn run_ref<'a>(run: *const PomRun) -> Result<&'a PomRun, Fail> {
    run.as_ref().ok_or_else(|| null("run"))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(PomStatus::Internal, "string contains NUL".into()))?;
    put(out, c.into_raw(), "out")
}

unsafe fn samples<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pom_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pom_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Play one game of a built-in experiment. `backend` is "scripted", "mock"
/// or "llm" (the latter reads POM_API_KEY, POM_MODEL, POM_ENDPOINT).
/// `log_path` may be null; otherwise the log is written there as it grows.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pom_run_preset(
    preset_name: *const c_char,
    backend: *const c_char,
    seed: u64,
    log_path: *const c_char,
    out: *mut *mut PomRun,
) -> PomStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let mut cfg = preset(text(preset_name, "preset")?)?;
        cfg.backend = text(backend, "backend")?.parse::<Backend>()?;
        let path = if log_path.is_null() {
            None
        } else {
            Some(Path::new(text(log_path, "log_path")?))
        };
        let gateway = build_gateway(cfg.backend, GatewayPolicy::default())?;
        let record = run_one(&cfg, seed, gateway.as_ref(), path)?;
        put(out, Box::into_raw(Box::new(PomRun { record })), "out")
    })
}

/// Load a log from disk.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pom_run_load(path: *const c_char, out: *mut *mut PomRun) -> PomStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let record = RunRecord::load(Path::new(text(path, "path")?))?;
        put(out, Box::into_raw(Box::new(PomRun { record })), "out")
    })
}

/// Release a run. Null is ignored.
///
/// # Safety
/// `run` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pom_run_free(run: *mut PomRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Whether the game reached its end without an error.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pom_run_complete(run: *const PomRun, out: *mut bool) -> PomStatus {
    guard(|| put(out, run_ref(run)?.record.is_complete(), "out"))
}

/// Whether the Port survived. Fails for unfinished games.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pom_run_survived(run: *const PomRun, out: *mut bool) -> PomStatus {
    guard(|| {
        let o = run_ref(run)?.record.outcome.as_ref().and_then(|o| o.outcome.as_ref());
        let o = o.ok_or_else(|| Fail(PomStatus::InvalidInput, "game did not finish".into()))?;
        put(out, o.survived(), "out")
    })
}

/// Health when the game stopped.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pom_run_final_health(run: *const PomRun, out: *mut i64) -> PomStatus {
    guard(|| {
        let o = run_ref(run)?.record.outcome.as_ref();
        let o = o.ok_or_else(|| Fail(PomStatus::InvalidInput, "log has no outcome".into()))?;
        put(out, o.final_health, "out")
    })
}

/// Number of phase entries in the log.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pom_run_entry_count(run: *const PomRun, out: *mut usize) -> PomStatus {
    guard(|| put(out, run_ref(run)?.record.entries.len(), "out"))
}

/// Final link of the digest chain, hex encoded. Free with `pom_string_free`.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pom_run_head(run: *const PomRun, out: *mut *mut c_char) -> PomStatus {
    guard(|| put_string(out, run_ref(run)?.record.head()))
}

/// The whole log as JSON Lines. Free with `pom_string_free`.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pom_run_jsonl(run: *const PomRun, out: *mut *mut c_char) -> PomStatus {
    guard(|| put_string(out, run_ref(run)?.record.to_jsonl()))
}

/// Game metrics recomputed from the log, as JSON. Free with `pom_string_free`.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pom_run_metrics_json(run: *const PomRun, out: *mut *mut c_char) -> PomStatus {
    guard(|| {
        let m = RunMetrics::from_record(&run_ref(run)?.record)
            .ok_or_else(|| Fail(PomStatus::InvalidInput, "game did not finish".into()))?;
        put_string(out, serde_json::to_string(&m).map_err(|e| Fail(PomStatus::Internal, e.to_string()))?)
    })
}

/// Re-execute the log and compare every chain link. `POM_STATUS_MISMATCH`
/// when the log was altered or does not reproduce.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pom_run_replay(run: *const PomRun) -> PomStatus {
    guard(|| match replay(&run_ref(run)?.record) {
        Ok(_) => Ok(()),
        Err(ReplayError::Chain(e)) => Err(e.into()),
        Err(ReplayError::Setup(e)) => Err(Fail(PomStatus::InvalidInput, e.to_string())),
        Err(e) => Err(Fail(PomStatus::Mismatch, e.to_string())),
    })
}

/// Gini coefficient of `len` non-negative values.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pom_gini(values: *const f64, len: usize, out: *mut f64) -> PomStatus {
    guard(|| {
        let g = gini(samples(values, len, "values")?).map_err(|e| Fail(PomStatus::InvalidInput, e.to_string()))?;
        put(out, g, "out")
    })
}

/// Two-sided Welch t-test p-value.
///
/// # Safety
/// `a` and `b` must point to `na` and `nb` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pom_welch_p(a: *const f64, na: usize, b: *const f64, nb: usize, out: *mut f64) -> PomStatus {
    guard(|| {
        let p = welch_p(samples(a, na, "a")?, samples(b, nb, "b")?)
            .map_err(|e| Fail(PomStatus::InvalidInput, e.to_string()))?;
        put(out, p, "out")
    })
}
