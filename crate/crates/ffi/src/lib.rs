//! C bindings for `impact-core`.
//!
//! Every function returns an [`ImpactStatus`]. On failure the message is kept
//! per thread and can be copied out with [`impact_last_error`]. Handles are
//! opaque and must be released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use impact_core::error::Error;
use impact_core::impact::binning::{bin_samples, Binning};
use impact_core::impact::fit::fit_power_law;
use impact_core::powerlaw::{clauset_fit, Variant};
use impact_core::report::config::PipelineConfig;
use impact_core::report::pipeline::{run_pipeline, PipelineReport};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImpactStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Data = 4,
    Numeric = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImpactVariant {
    Continuous = 0,
    Discrete = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImpactLevel {
    Stock = 0,
    Trader = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ImpactTailFit {
    pub exponent: f64,
    pub x_min: f64,
    pub n_tail: usize,
    pub ks: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ImpactPowerFit {
    pub delta: f64,
    pub c: f64,
    pub n_bin: usize,
    pub objective: f64,
    pub converged: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ImpactLevelSummary {
    /// Number of fitted entities.
    pub n: usize,
    pub mean_delta: f64,
    pub std_delta: f64,
    pub sem_delta: f64,
    /// False when the run had no Monte Carlo stage for this level; the
    /// three fields below are then NaN.
    pub has_corrected: bool,
    pub corrected_delta: f64,
    pub corrected_se: f64,
    pub bias: f64,
}

/// Pipeline configuration.
pub struct ImpactConfig(PipelineConfig);

/// Result of a pipeline run.
pub struct ImpactReport(PipelineReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ImpactStatus {
    match e {
        Error::Config(_) => ImpactStatus::Config,
        Error::Numeric(_) => ImpactStatus::Numeric,
        Error::Io { .. } => ImpactStatus::Io,
        Error::Stage { source, .. } => status_of(source),
        _ => ImpactStatus::Data,
    }
}

struct Fail(ImpactStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ImpactStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ImpactStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ImpactStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(ImpactStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn path(p: *const c_char, what: &str) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| {
        Fail(
            ImpactStatus::InvalidArgument,
            format!("{what} is not valid UTF-8"),
        )
    })?;
    Ok(PathBuf::from(s))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn impact_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, or 0
/// when there is no error.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn impact_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Tail exponent with x_min chosen by KS minimisation.
///
/// # Safety
/// `samples` must be valid for `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_tail_fit(
    samples: *const f64,
    n: usize,
    variant: ImpactVariant,
    out: *mut ImpactTailFit,
) -> ImpactStatus {
    guard(|| {
        let xs = slice(samples, n, "samples")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = match variant {
            ImpactVariant::Continuous => Variant::Continuous,
            ImpactVariant::Discrete => Variant::Discrete,
        };
        let f = clauset_fit(xs, v).map_err(|e| Fail(ImpactStatus::Data, e.to_string()))?;
        *out = ImpactTailFit {
            exponent: f.exponent,
            x_min: f.x_min,
            n_tail: f.n_tail,
            ks: f.ks,
        };
        Ok(())
    })
}

/// Bin `(q[i], impact[i])` on the default log grid and fit `c * q^delta`
/// over bins holding more than `min_bin_count` samples.
///
/// # Safety
/// `q` and `impact` must be valid for `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_fit_samples(
    q: *const f64,
    impact: *const f64,
    n: usize,
    min_bin_count: usize,
    out: *mut ImpactPowerFit,
) -> ImpactStatus {
    guard(|| {
        let q = slice(q, n, "q")?;
        let i = slice(impact, n, "impact")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let binned = bin_samples(Binning::default(), q.iter().copied().zip(i.iter().copied()));
        let f = fit_power_law(&binned, min_bin_count)
            .map_err(|e| Fail(ImpactStatus::Numeric, e.to_string()))?;
        *out = ImpactPowerFit {
            delta: f.delta,
            c: f.c,
            n_bin: f.n_bin,
            objective: f.objective,
            converged: f.converged,
        };
        Ok(())
    })
}

/// Load a TOML config. Relative input paths resolve against its directory.
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_config_load(
    config_path: *const c_char,
    out: *mut *mut ImpactConfig,
) -> ImpactStatus {
    guard(|| {
        let p = path(config_path, "config_path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = PipelineConfig::load(&p)?;
        cfg.validate()?;
        *out = Box::into_raw(Box::new(ImpactConfig(cfg)));
        Ok(())
    })
}

/// Override both the Monte Carlo and the synthetic-generator seed.
///
/// # Safety
/// `cfg` must come from [`impact_config_load`].
#[no_mangle]
pub unsafe extern "C" fn impact_config_set_seed(cfg: *mut ImpactConfig, seed: u64) -> ImpactStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        cfg.0.montecarlo.seed = seed;
        cfg.0.synth.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or come from [`impact_config_load`], and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn impact_config_free(cfg: *mut ImpactConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Run every stage, writing artifacts under `out_dir`.
///
/// # Safety
/// `cfg` must come from [`impact_config_load`]; `out_dir` must be a
/// NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_pipeline_run(
    cfg: *const ImpactConfig,
    out_dir: *const c_char,
    out: *mut *mut ImpactReport,
) -> ImpactStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        let dir = path(out_dir, "out_dir")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = run_pipeline(&cfg.0, &dir)?;
        *out = Box::into_raw(Box::new(ImpactReport(report)));
        Ok(())
    })
}

/// Summary of the fitted exponents at one level.
///
/// # Safety
/// `report` must come from [`impact_pipeline_run`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_report_summary(
    report: *const ImpactReport,
    level: ImpactLevel,
    out: *mut ImpactLevelSummary,
) -> ImpactStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| null("report"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let (fits, key) = match level {
            ImpactLevel::Stock => (&r.stock_fits, "stock"),
            ImpactLevel::Trader => (&r.trader_fits, "trader"),
        };
        let s = fits
            .summary()
            .ok_or_else(|| Fail(ImpactStatus::Data, format!("no {key} fits")))?;
        let c = r.corrected.get(key);
        *out = ImpactLevelSummary {
            n: s.n,
            mean_delta: s.mean,
            std_delta: s.std,
            sem_delta: s.sem,
            has_corrected: c.is_some(),
            corrected_delta: c.map_or(f64::NAN, |c| c.mean),
            corrected_se: c.map_or(f64::NAN, |c| c.se),
            bias: c.map_or(f64::NAN, |c| c.bias),
        };
        Ok(())
    })
}

/// # Safety
/// `report` must be null or come from [`impact_pipeline_run`], and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn impact_report_free(report: *mut ImpactReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
