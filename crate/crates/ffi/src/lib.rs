//! C ABI over `exitwalk`.
//!
//! Every fallible function returns an [`ExwStatus`]; on failure a message is
//! available from [`exw_last_error`] on the calling thread. Objects are opaque
//! handles created by `*_new`/`*_load` functions and released by the matching
//! `*_free`. Output pointers are written only on success.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use exitwalk::bessel_hitting::{self, MovingBoundary, SpectralSeriesCache, InversionSettings};
use exitwalk::harness::{self, ExperimentConfig};
use exitwalk::samplers::{self, RngStream};
use exitwalk::specfun::BesselIndex;
use exitwalk::walkers::{self, ExitMode, ExitSample, SphereDomain, TableMethod, Tau1Table, WosDeps};
use exitwalk::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExwStatus {
    Ok = 0,
    Domain = 1,
    Overflow = 2,
    BelowSeriesCutoff = 3,
    Truncation = 4,
    NoConvergence = 5,
    StepBudget = 6,
    GridTooCoarse = 7,
    MissingTable = 8,
    Format = 9,
    DegenerateFit = 10,
    Config = 11,
    Io = 12,
    NullPointer = 13,
    Panic = 14,
}

/// Time accounting of the walk on spheres.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExwExitMode {
    PositionOnly = 0,
    Inversion = 1,
    Table = 2,
}

/// Generator of a precomputed exit-time table.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExwTableMethod {
    Inversion = 0,
    Euler = 1,
}

/// Scalar outcome of one trajectory.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExwExit {
    pub exit_time: f64,
    pub steps: u64,
}

/// Random stream (seed, stream id).
pub struct ExwRng(RngStream);

/// Table of unit-ball exit times.
pub struct ExwTable(Tau1Table);

/// Spectral series of the Bessel level-hitting time.
pub struct ExwSpectral(SpectralSeriesCache);

/// Prepared inputs of the walk on spheres.
pub struct ExwWosContext {
    mode: ExitMode,
    delta: u32,
    deps: WosDeps,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ExwStatus {
    match e {
        Error::Domain(_) => ExwStatus::Domain,
        Error::Overflow(_) => ExwStatus::Overflow,
        Error::BelowSeriesCutoff { .. } => ExwStatus::BelowSeriesCutoff,
        Error::Truncation { .. } => ExwStatus::Truncation,
        Error::NoConvergence { .. } => ExwStatus::NoConvergence,
        Error::StepBudget { .. } => ExwStatus::StepBudget,
        Error::GridTooCoarse { .. } => ExwStatus::GridTooCoarse,
        Error::MissingTable => ExwStatus::MissingTable,
        Error::Format(_) => ExwStatus::Format,
        Error::DegenerateFit(_) => ExwStatus::DegenerateFit,
        Error::Config(_) => ExwStatus::Config,
        Error::Io(_) => ExwStatus::Io,
    }
}

struct Fail(ExwStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ExwStatus::NullPointer, format!("{what} is null"))
}

// Runs `f`, translating errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ExwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ExwStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ExwStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<String, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Fail(ExwStatus::Config, "path is not valid UTF-8".into()))
}

fn index(delta: u32) -> Result<BesselIndex, Fail> {
    Ok(BesselIndex::from_dimension(delta)?)
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn exw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Build identifier, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn exw_version() -> *const c_char {
    static VERSION: std::sync::OnceLock<CString> = std::sync::OnceLock::new();
    VERSION.get_or_init(|| CString::new(harness::BUILD_ID).unwrap_or_default()).as_ptr()
}

/// New random stream; never NULL.
#[no_mangle]
pub extern "C" fn exw_rng_new(seed: u64, stream_id: u64) -> *mut ExwRng {
    Box::into_raw(Box::new(ExwRng(RngStream::new(seed, stream_id))))
}

#[no_mangle]
pub unsafe extern "C" fn exw_rng_free(rng: *mut ExwRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// Uniform draw on (0, 1].
#[no_mangle]
pub unsafe extern "C" fn exw_rng_uniform(rng: *mut ExwRng, value: *mut f64) -> ExwStatus {
    guard(|| {
        let r = out(rng, "rng")?;
        *out(value, "value")? = r.0.uniform_pos();
        Ok(())
    })
}

/// Moving-sphere parameter `a` for distance `d` and safety factor `gamma`.
#[no_mangle]
pub unsafe extern "C" fn exw_moving_sphere_param_a(d: f64, gamma: f64, delta: u32, a: *mut f64) -> ExwStatus {
    guard(|| {
        let v = bessel_hitting::moving_sphere_param_a(d, gamma, index(delta)?)?;
        *out(a, "a")? = v;
        Ok(())
    })
}

/// Moving boundary `psi(t)` for parameter `a`.
#[no_mangle]
pub unsafe extern "C" fn exw_psi(a: f64, delta: u32, t: f64, value: *mut f64) -> ExwStatus {
    guard(|| {
        let v = MovingBoundary::new(a, index(delta)?)?.psi(t)?;
        *out(value, "value")? = v;
        Ok(())
    })
}

/// Density of the hitting time of the moving boundary.
#[no_mangle]
pub unsafe extern "C" fn exw_hitting_pdf(a: f64, delta: u32, t: f64, value: *mut f64) -> ExwStatus {
    guard(|| {
        let v = MovingBoundary::new(a, index(delta)?)?.hitting_pdf(t)?;
        *out(value, "value")? = v;
        Ok(())
    })
}

/// Draw of the moving-boundary hitting time.
#[no_mangle]
pub unsafe extern "C" fn exw_sample_tau_psi(a: f64, delta: u32, rng: *mut ExwRng, value: *mut f64) -> ExwStatus {
    guard(|| {
        let r = out(rng, "rng")?;
        let v = samplers::sample_tau_psi(a, index(delta)?, &mut r.0)?;
        *out(value, "value")? = v;
        Ok(())
    })
}

/// Laplace transform `E_x exp(-lambda tau_L)` of the Bessel level-hitting time.
#[no_mangle]
pub unsafe extern "C" fn exw_laplace_transform(lambda: f64, x: f64, radius: f64, delta: u32, value: *mut f64) -> ExwStatus {
    guard(|| {
        let v = bessel_hitting::laplace_transform(lambda, x, radius, index(delta)?)?;
        *out(value, "value")? = v;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn exw_spectral_new(delta: u32, radius: f64, cache: *mut *mut ExwSpectral) -> ExwStatus {
    guard(|| {
        let slot = out(cache, "cache")?;
        let c = SpectralSeriesCache::new(index(delta)?, radius)?;
        *slot = Box::into_raw(Box::new(ExwSpectral(c)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn exw_spectral_free(cache: *mut ExwSpectral) {
    if !cache.is_null() {
        drop(Box::from_raw(cache));
    }
}

/// Survival function `P_0(tau_L > t)`.
#[no_mangle]
pub unsafe extern "C" fn exw_tail_spectral(cache: *const ExwSpectral, t: f64, value: *mut f64) -> ExwStatus {
    guard(|| {
        let v = get(cache, "cache")?.0.tail(t)?;
        *out(value, "value")? = v;
        Ok(())
    })
}

/// Quantile `F^{-1}(u)` of the level-hitting time, default tolerance.
#[no_mangle]
pub unsafe extern "C" fn exw_invert_cdf(cache: *const ExwSpectral, u: f64, value: *mut f64) -> ExwStatus {
    guard(|| {
        let v = bessel_hitting::invert_cdf(u, &get(cache, "cache")?.0, &InversionSettings::default())?;
        *out(value, "value")? = v;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn exw_table_precompute(
    count: usize,
    delta: u32,
    method: ExwTableMethod,
    h: f64,
    rng: *mut ExwRng,
    table: *mut *mut ExwTable,
) -> ExwStatus {
    guard(|| {
        let r = out(rng, "rng")?;
        let slot = out(table, "table")?;
        let m = match method {
            ExwTableMethod::Inversion => TableMethod::Inversion,
            ExwTableMethod::Euler => TableMethod::Euler { h },
        };
        let t = walkers::precompute_table(count, delta, m, &mut r.0)?;
        *slot = Box::into_raw(Box::new(ExwTable(t)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn exw_table_load(path: *const c_char, table: *mut *mut ExwTable) -> ExwStatus {
    guard(|| {
        let slot = out(table, "table")?;
        let t = Tau1Table::load(path_arg(path)?)?;
        *slot = Box::into_raw(Box::new(ExwTable(t)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn exw_table_save(table: *const ExwTable, path: *const c_char) -> ExwStatus {
    guard(|| {
        get(table, "table")?.0.save(path_arg(path)?)?;
        Ok(())
    })
}

/// Number of samples, 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn exw_table_count(table: *const ExwTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.count())
}

/// Borrowed pointer to the samples, valid while the table lives; NULL for NULL.
#[no_mangle]
pub unsafe extern "C" fn exw_table_samples(table: *const ExwTable) -> *const f64 {
    table.as_ref().map_or(ptr::null(), |t| t.0.samples().as_ptr())
}

#[no_mangle]
pub unsafe extern "C" fn exw_table_free(table: *mut ExwTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Inputs of the walk on spheres in dimension `delta`. `table` (cloned) is
/// required for table mode and ignored otherwise.
#[no_mangle]
pub unsafe extern "C" fn exw_wos_context_new(
    delta: u32,
    mode: ExwExitMode,
    table: *const ExwTable,
    context: *mut *mut ExwWosContext,
) -> ExwStatus {
    guard(|| {
        let slot = out(context, "context")?;
        let mode = match mode {
            ExwExitMode::PositionOnly => ExitMode::PositionOnly,
            ExwExitMode::Inversion => ExitMode::Inversion,
            ExwExitMode::Table => ExitMode::Table,
        };
        let mut deps = WosDeps::for_mode(mode, delta)?;
        if mode == ExitMode::Table {
            deps = deps.with_table(table.as_ref().ok_or(Error::MissingTable)?.0.clone());
        }
        *slot = Box::into_raw(Box::new(ExwWosContext { mode, delta, deps }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn exw_wos_context_free(context: *mut ExwWosContext) {
    if !context.is_null() {
        drop(Box::from_raw(context));
    }
}

unsafe fn write_exit(
    s: ExitSample,
    result: *mut ExwExit,
    exit_position: *mut f64,
    projected_position: *mut f64,
) -> Result<(), Fail> {
    let r = out(result, "result")?;
    let n = s.exit_position.len();
    if !exit_position.is_null() {
        slice::from_raw_parts_mut(exit_position, n).copy_from_slice(&s.exit_position);
    }
    if !projected_position.is_null() {
        slice::from_raw_parts_mut(projected_position, n).copy_from_slice(&s.projected_position);
    }
    *r = ExwExit { exit_time: s.exit_time, steps: s.steps };
    Ok(())
}

unsafe fn start_point<'a>(x0: *const f64, delta: u32) -> Result<&'a [f64], Fail> {
    if x0.is_null() {
        return Err(null("x0"));
    }
    Ok(slice::from_raw_parts(x0, delta as usize))
}

/// One walk-on-moving-spheres trajectory. `x0`, and the optional position
/// buffers, hold `delta` doubles.
#[no_mangle]
pub unsafe extern "C" fn exw_woms_run(
    x0: *const f64,
    delta: u32,
    radius: f64,
    epsilon: f64,
    gamma: f64,
    rng: *mut ExwRng,
    result: *mut ExwExit,
    exit_position: *mut f64,
    projected_position: *mut f64,
) -> ExwStatus {
    guard(|| {
        let r = out(rng, "rng")?;
        let x = start_point(x0, delta)?;
        let dom = SphereDomain::new(radius, delta)?;
        let s = walkers::woms_run(x, &dom, epsilon, gamma, &mut r.0)?;
        write_exit(s, result, exit_position, projected_position)
    })
}

/// One walk-on-spheres trajectory with the context's dimension and mode.
#[no_mangle]
pub unsafe extern "C" fn exw_wos_run(
    context: *const ExwWosContext,
    x0: *const f64,
    radius: f64,
    epsilon: f64,
    rng: *mut ExwRng,
    result: *mut ExwExit,
    exit_position: *mut f64,
    projected_position: *mut f64,
) -> ExwStatus {
    guard(|| {
        let ctx = get(context, "context")?;
        let r = out(rng, "rng")?;
        let x = start_point(x0, ctx.delta)?;
        let dom = SphereDomain::new(radius, ctx.delta)?;
        let s = walkers::wos_run(x, &dom, epsilon, ctx.mode, &ctx.deps, &mut r.0)?;
        write_exit(s, result, exit_position, projected_position)
    })
}

/// One naive Euler trajectory with step `h`.
#[no_mangle]
pub unsafe extern "C" fn exw_euler_run(
    x0: *const f64,
    delta: u32,
    radius: f64,
    h: f64,
    rng: *mut ExwRng,
    result: *mut ExwExit,
    exit_position: *mut f64,
    projected_position: *mut f64,
) -> ExwStatus {
    guard(|| {
        let r = out(rng, "rng")?;
        let x = start_point(x0, delta)?;
        let dom = SphereDomain::new(radius, delta)?;
        let s = walkers::euler_run(x, &dom, h, &mut r.0)?;
        write_exit(s, result, exit_position, projected_position)
    })
}

/// Runs an experiment described by a JSON configuration (the `config` object
/// of a run report) and returns the full run report as JSON. Release the
/// string with [`exw_string_free`].
#[no_mangle]
pub unsafe extern "C" fn exw_run_experiment_json(config_json: *const c_char, report_json: *mut *mut c_char) -> ExwStatus {
    guard(|| {
        let slot = out(report_json, "report_json")?;
        if config_json.is_null() {
            return Err(null("config_json"));
        }
        let text = CStr::from_ptr(config_json)
            .to_str()
            .map_err(|_| Fail(ExwStatus::Config, "configuration is not valid UTF-8".into()))?;
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Fail(ExwStatus::Config, format!("configuration JSON: {e}")))?;
        let stats = harness::run_experiment(&config)?;
        let json = serde_json::to_string(&harness::run_report(&config, &stats))
            .map_err(|e| Fail(ExwStatus::Format, e.to_string()))?;
        *slot = CString::new(json).map_err(|e| Fail(ExwStatus::Format, e.to_string()))?.into_raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn exw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
