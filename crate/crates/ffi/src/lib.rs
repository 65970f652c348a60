//! C ABI over `qchaos`.
//!
//! Objects are opaque heap handles released with their `*_free` function.
//! Every fallible call returns a `QcStatus`; on failure the message is kept
//! per thread and can be read with `qc_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qchaos::control::{simulate_sync, ControllerConfig, SyncRun, DEFAULT_EPSILON, DEFAULT_GAIN, DEFAULT_SURFACE};
use qchaos::diagnostics::{largest_lyapunov, periodogram};
use qchaos::integrator::{integrate, IntegratorSettings, PhaseState, Trajectory};
use qchaos::model::{derive_params, velocity_excited, Branch, ComplexPoint, EigenstateSpec, OscillatorParams, StateField};
use qchaos::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DegenerateAnisotropy = 3,
    NodalSingularity = 4,
    UncontrollableSurface = 5,
    InvalidController = 6,
    SeriesTooShort = 7,
    UndefinedExponent = 8,
    IndexOutOfRange = 9,
    Panic = 10,
    Other = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcBranch {
    Plus = 0,
    Minus = 1,
}

/// `(x_r, x_i, y_r, y_i)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QcState {
    pub x_r: f64,
    pub x_i: f64,
    pub y_r: f64,
    pub y_i: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcController {
    pub surface: [f64; 4],
    pub gain: [f64; 4],
    pub q: f64,
    pub r: f64,
    pub epsilon: f64,
}

pub struct QcParams(OscillatorParams);
pub struct QcTrajectory(Trajectory);
pub struct QcSyncRun(SyncRun);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> QcStatus {
    match e {
        Error::DegenerateAnisotropy { .. } => QcStatus::DegenerateAnisotropy,
        Error::NodalSingularity { .. } => QcStatus::NodalSingularity,
        Error::UncontrollableSurface { .. } => QcStatus::UncontrollableSurface,
        Error::InvalidController(_) => QcStatus::InvalidController,
        Error::SeriesTooShort { .. } => QcStatus::SeriesTooShort,
        Error::UndefinedExponent(_) => QcStatus::UndefinedExponent,
        Error::IndexOutOfRange(_) => QcStatus::IndexOutOfRange,
        Error::InvalidArgument(_) | Error::InvalidParams(_) | Error::MismatchedGrids => QcStatus::InvalidArgument,
        _ => QcStatus::Other,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (QcStatus, String)>) -> QcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside qchaos".into());
            QcStatus::Panic
        }
    }
}

fn lift<T>(r: qchaos::Result<T>) -> Result<T, (QcStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (QcStatus, String) {
    (QcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (QcStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), (QcStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

impl From<QcState> for PhaseState {
    fn from(s: QcState) -> Self {
        PhaseState::new(s.x_r, s.x_i, s.y_r, s.y_i)
    }
}

impl From<PhaseState> for QcState {
    fn from(s: PhaseState) -> Self {
        QcState { x_r: s.x_r, x_i: s.x_i, y_r: s.y_r, y_i: s.y_i }
    }
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn qc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qc_params_new(beta: f64, gamma: f64, branch: QcBranch, out: *mut *mut QcParams) -> QcStatus {
    guard(|| {
        let b = match branch {
            QcBranch::Plus => Branch::Plus,
            QcBranch::Minus => Branch::Minus,
        };
        let p = lift(derive_params(beta, gamma, b))?;
        write(out, Box::into_raw(Box::new(QcParams(p))), "out")
    })
}

/// # Safety
/// `p` must come from `qc_params_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qc_params_free(p: *mut QcParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Looks up a derived coefficient by name (`"a1"`, `"b1"`, `"eta1"`, `"D"`, ...).
///
/// # Safety
/// `p` must be a live handle, `name` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qc_params_get(p: *const QcParams, name: *const c_char, out: *mut f64) -> QcStatus {
    guard(|| {
        let p = as_ref(p, "params")?;
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name).to_str().map_err(|_| (QcStatus::InvalidArgument, "name is not UTF-8".into()))?;
        let v = p
            .0
            .table()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v)
            .ok_or_else(|| (QcStatus::InvalidArgument, format!("unknown coefficient `{name}`")))?;
        write(out, v, "out")
    })
}

/// Velocity of the first excited state at `at`, written as a state of derivatives.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qc_velocity_excited(p: *const QcParams, at: QcState, out: *mut QcState) -> QcStatus {
    guard(|| {
        let p = as_ref(p, "params")?;
        let (dx, dy) = lift(velocity_excited(&p.0, &ComplexPoint::from_parts(at.x_r, at.x_i, at.y_r, at.y_i)))?;
        write(out, QcState { x_r: dx.re, x_i: dx.im, y_r: dy.re, y_i: dy.im }, "out")
    })
}

/// Integrates eigenstate `(n1, n2)` from `initial`. A nodal singularity
/// truncates the trajectory instead of failing; see `qc_trajectory_aborted`.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qc_integrate(
    p: *const QcParams,
    n1: u32,
    n2: u32,
    initial: QcState,
    t_final: f64,
    dt: f64,
    stride: usize,
    out: *mut *mut QcTrajectory,
) -> QcStatus {
    guard(|| {
        let p = as_ref(p, "params")?;
        let field = StateField::new(p.0, EigenstateSpec::new(n1, n2));
        let tr = lift(integrate(&field, initial.into(), t_final, dt, stride))?;
        write(out, Box::into_raw(Box::new(QcTrajectory(tr))), "out")
    })
}

/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_trajectory_len(t: *const QcTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_trajectory_dt_sample(t: *const QcTrajectory) -> f64 {
    t.as_ref().map_or(f64::NAN, |t| t.0.dt_sample)
}

/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_trajectory_aborted(t: *const QcTrajectory) -> bool {
    t.as_ref().is_some_and(|t| t.0.is_truncated())
}

/// # Safety
/// `t` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qc_trajectory_state(t: *const QcTrajectory, k: usize, out: *mut QcState) -> QcStatus {
    guard(|| {
        let t = as_ref(t, "trajectory")?;
        let s = t
            .0
            .states
            .get(k)
            .ok_or_else(|| (QcStatus::IndexOutOfRange, format!("sample {k} of {}", t.0.len())))?;
        write(out, (*s).into(), "out")
    })
}

/// # Safety
/// `t` must come from `qc_integrate` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qc_trajectory_free(t: *mut QcTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

#[no_mangle]
pub extern "C" fn qc_controller_default() -> QcController {
    QcController { surface: DEFAULT_SURFACE, gain: DEFAULT_GAIN, q: 1.0, r: 1.0, epsilon: DEFAULT_EPSILON }
}

/// Synchronizes `slave` to `master` under the first excited state.
///
/// # Safety
/// `p` and `ctl` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qc_sync(
    p: *const QcParams,
    ctl: *const QcController,
    master: QcState,
    slave: QcState,
    t_final: f64,
    dt: f64,
    stride: usize,
    out: *mut *mut QcSyncRun,
) -> QcStatus {
    guard(|| {
        let p = as_ref(p, "params")?;
        let c = as_ref(ctl, "controller")?;
        let cfg = lift(ControllerConfig::new(c.surface, c.gain, c.q, c.r, c.epsilon))?;
        let settings = lift(IntegratorSettings::new(t_final, dt, stride))?;
        let run = lift(simulate_sync(&p.0, &cfg, master.into(), slave.into(), settings))?;
        write(out, Box::into_raw(Box::new(QcSyncRun(run))), "out")
    })
}

/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_sync_len(run: *const QcSyncRun) -> usize {
    run.as_ref().map_or(0, |r| r.0.len())
}

/// Error, control input and sliding value at sample `k`. Any output pointer
/// may be null.
///
/// # Safety
/// `run` must be a live handle; non-null outputs must hold 4 doubles
/// (`error`, `control`) or 1 double (`s`).
#[no_mangle]
pub unsafe extern "C" fn qc_sync_sample(
    run: *const QcSyncRun,
    k: usize,
    error: *mut f64,
    control: *mut f64,
    s: *mut f64,
) -> QcStatus {
    guard(|| {
        let r = &as_ref(run, "run")?.0;
        if k >= r.len() {
            return Err((QcStatus::IndexOutOfRange, format!("sample {k} of {}", r.len())));
        }
        if !error.is_null() {
            ptr::copy_nonoverlapping(r.error[k].as_ptr(), error, 4);
        }
        if !control.is_null() {
            ptr::copy_nonoverlapping(r.control[k].as_ptr(), control, 4);
        }
        if !s.is_null() {
            s.write(r.sliding[k]);
        }
        Ok(())
    })
}

/// Largest `|e_i|` over samples after `t_from`.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_sync_max_error_after(run: *const QcSyncRun, t_from: f64) -> f64 {
    run.as_ref().map_or(f64::NAN, |r| r.0.max_error_after(t_from))
}

/// Time from which `|s| < epsilon` holds; `IndexOutOfRange` if never.
///
/// # Safety
/// `run` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qc_sync_reach_time(run: *const QcSyncRun, epsilon: f64, out: *mut f64) -> QcStatus {
    guard(|| {
        let r = &as_ref(run, "run")?.0;
        let t = r
            .reach_time(epsilon)
            .ok_or_else(|| (QcStatus::IndexOutOfRange, "sliding value never settles".into()))?;
        write(out, t, "out")
    })
}

/// # Safety
/// `run` must come from `qc_sync` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qc_sync_free(run: *mut QcSyncRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

unsafe fn series<'a>(data: *const f64, len: usize) -> Result<&'a [f64], (QcStatus, String)> {
    if data.is_null() {
        return Err(null("series"));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

/// Median Rosenstein exponent over delays `tau_min..=tau_max`.
///
/// # Safety
/// `data` must hold `len` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_largest_lyapunov(
    data: *const f64,
    len: usize,
    dt_sample: f64,
    embed_dim: usize,
    tau_min: usize,
    tau_max: usize,
    out: *mut f64,
) -> QcStatus {
    guard(|| {
        let x = series(data, len)?;
        if tau_max < tau_min {
            return Err((QcStatus::InvalidArgument, "tau_max < tau_min".into()));
        }
        let taus: Vec<usize> = (tau_min..=tau_max).collect();
        let r = lift(largest_lyapunov(x, dt_sample, embed_dim, &taus))?;
        write(out, r.slope, "out")
    })
}

/// Spectral flatness of the Hann-windowed periodogram.
///
/// # Safety
/// `data` must hold `len` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_spectral_flatness(data: *const f64, len: usize, dt_sample: f64, out: *mut f64) -> QcStatus {
    guard(|| {
        let s = lift(periodogram(series(data, len)?, dt_sample))?;
        write(out, s.flatness, "out")
    })
}
