//! C interface to `herald_core`.
//!
//! Every fallible call returns a [`HeraldStatus`] and writes its result
//! through an out-pointer. Configurations and simulation runs are opaque
//! handles owned by the caller and released with the matching `_free`.
//! Strings returned by the library are released with [`herald_string_free`].
//! The text of the most recent failure on the calling thread is available
//! from [`herald_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};

use herald_core::error::Error;
use herald_core::sweep::{run_sweep, write_csv, SweepSpec, SweepTarget};
use herald_core::{
    loss_budget, optimal_mean, run_delay_multiplexed, run_switched_array, source_comparison,
    LossModel, MultiplexConfig, QuantumEfficiency, SimulationEstimate, SimulationSpec,
    StatisticsKind,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeraldStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    UndefinedPosterior = 3,
    UndefinedConditioning = 4,
    DelayOutOfRange = 5,
    NotUnimodal = 6,
    InvalidArgument = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeraldKind {
    BoseEinstein = 0,
    Poisson = 1,
}

impl From<HeraldKind> for StatisticsKind {
    fn from(k: HeraldKind) -> Self {
        match k {
            HeraldKind::BoseEinstein => StatisticsKind::BoseEinstein,
            HeraldKind::Poisson => StatisticsKind::Poisson,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HeraldSourceComparison {
    pub faint_laser: f64,
    pub conventional_unheralded: f64,
    pub conventional_heralded: f64,
    pub multiplexed_heralded: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HeraldLossBudget {
    pub net_transmittance: f64,
    pub net_loss: f64,
}

/// One Monte Carlo estimate. `name` stays valid until the owning
/// simulation is freed. `defined` is false when the denominator is zero,
/// in which case `estimate` and `standard_error` are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HeraldEstimate {
    pub name: *const c_char,
    pub delay: u32,
    pub numerator: u64,
    pub denominator: u64,
    pub defined: bool,
    pub estimate: f64,
    pub standard_error: f64,
}

/// Opaque source configuration.
pub struct HeraldConfig(MultiplexConfig);

/// Opaque finished simulation run.
pub struct HeraldSimulation {
    estimates: Vec<SimulationEstimate>,
    names: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> HeraldStatus {
    match e {
        Error::Domain { .. } => HeraldStatus::Domain,
        Error::UndefinedPosterior { .. } => HeraldStatus::UndefinedPosterior,
        Error::UndefinedConditioning { .. } => HeraldStatus::UndefinedConditioning,
        Error::DelayOutOfRange { .. } => HeraldStatus::DelayOutOfRange,
        Error::NotUnimodal => HeraldStatus::NotUnimodal,
        Error::Parse(_) => HeraldStatus::InvalidArgument,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => HeraldStatus::Io,
    }
}

fn fail(status: HeraldStatus, msg: &str) -> HeraldStatus {
    set_last_error(msg);
    status
}

/// Run `f`, mapping core errors and panics to status codes.
fn guard<F>(f: F) -> HeraldStatus
where
    F: FnOnce() -> Result<(), HeraldStatus> + UnwindSafe,
{
    match catch_unwind(f) {
        Ok(Ok(())) => HeraldStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(HeraldStatus::Panic, "internal panic"),
    }
}

trait IntoStatus<T> {
    fn status(self) -> Result<T, HeraldStatus>;
}

impl<T> IntoStatus<T> for herald_core::error::Result<T> {
    fn status(self) -> Result<T, HeraldStatus> {
        self.map_err(|e| fail(status_of(&e), &e.to_string()))
    }
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, HeraldStatus> {
    p.as_mut()
        .ok_or_else(|| fail(HeraldStatus::NullPointer, "null output pointer"))
}

unsafe fn config_ref<'a>(p: *const HeraldConfig) -> Result<&'a MultiplexConfig, HeraldStatus> {
    p.as_ref()
        .map(|c| &c.0)
        .ok_or_else(|| fail(HeraldStatus::NullPointer, "null configuration"))
}

/// Static description of a status code. Never null.
#[no_mangle]
pub extern "C" fn herald_status_message(status: HeraldStatus) -> *const c_char {
    let s: &'static CStr = match status {
        HeraldStatus::Ok => c"ok",
        HeraldStatus::NullPointer => c"null pointer argument",
        HeraldStatus::Domain => c"parameter outside its domain",
        HeraldStatus::UndefinedPosterior => c"posterior undefined: detector can never fire",
        HeraldStatus::UndefinedConditioning => c"conditional undefined: trigger can never fire",
        HeraldStatus::DelayOutOfRange => c"delay index out of range",
        HeraldStatus::NotUnimodal => c"objective not unimodal",
        HeraldStatus::InvalidArgument => c"invalid argument",
        HeraldStatus::Io => c"i/o or serialization failure",
        HeraldStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Message of the last failed call on this thread, empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn herald_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `out` must be null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn herald_config_new(
    nbar: f64,
    eta: f64,
    num_delays: u32,
    kind: HeraldKind,
    out: *mut *mut HeraldConfig,
) -> HeraldStatus {
    guard(|| {
        let out = out_ref(out)?;
        let cfg = MultiplexConfig::new(nbar, eta, num_delays, kind.into()).status()?;
        *out = Box::into_raw(Box::new(HeraldConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a handle from [`herald_config_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn herald_config_free(cfg: *mut HeraldConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Probability of no trigger in any delay.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn herald_no_trigger_prob(cfg: *const HeraldConfig, out: *mut f64) -> HeraldStatus {
    guard(|| {
        let cfg = config_ref(cfg)?;
        let out = out_ref(out)?;
        *out = cfg.no_trigger_prob();
        Ok(())
    })
}

/// Unconditional probability of exactly one photon in total.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn herald_single_photon_prob(cfg: *const HeraldConfig, out: *mut f64) -> HeraldStatus {
    guard(|| {
        let cfg = config_ref(cfg)?;
        let out = out_ref(out)?;
        *out = cfg.single_photon_prob();
        Ok(())
    })
}

/// Probability of exactly one photon given some trigger.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn herald_single_photon_prob_given_trigger(cfg: *const HeraldConfig, out: *mut f64) -> HeraldStatus {
    guard(|| {
        let cfg = config_ref(cfg)?;
        let out = out_ref(out)?;
        *out = cfg.single_photon_prob_given_trigger().status()?;
        Ok(())
    })
}

/// Probability of a single photon given the first trigger at delay `delay`
/// (1-based).
///
/// # Safety
/// `cfg` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn herald_certification(
    cfg: *const HeraldConfig,
    delay: u32,
    out: *mut f64,
) -> HeraldStatus {
    guard(|| {
        let cfg = config_ref(cfg)?;
        let out = out_ref(out)?;
        *out = cfg.certification(delay).status()?;
        Ok(())
    })
}

/// Probability that the first trigger occurs at delay `delay` (1-based).
///
/// # Safety
/// `cfg` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn herald_delay_fire_prob(
    cfg: *const HeraldConfig,
    delay: u32,
    out: *mut f64,
) -> HeraldStatus {
    guard(|| {
        let cfg = config_ref(cfg)?;
        let out = out_ref(out)?;
        *out = cfg.delay_fire_prob(delay).status()?;
        Ok(())
    })
}

/// Mean photon number maximising the single-photon probability.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn herald_optimal_mean(
    eta: f64,
    num_delays: u32,
    kind: HeraldKind,
    out: *mut f64,
) -> HeraldStatus {
    guard(|| {
        let out = out_ref(out)?;
        let eta = QuantumEfficiency::new(eta).status()?;
        *out = optimal_mean(eta, num_delays, kind.into()).status()?.get();
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn herald_source_comparison(
    nbar: f64,
    eta: f64,
    num_delays: u32,
    out: *mut HeraldSourceComparison,
) -> HeraldStatus {
    guard(|| {
        let out = out_ref(out)?;
        let c = source_comparison(nbar, eta, num_delays).status()?;
        *out = HeraldSourceComparison {
            faint_laser: c.faint_laser,
            conventional_unheralded: c.conventional_unheralded,
            conventional_heralded: c.conventional_heralded,
            multiplexed_heralded: c.multiplexed_heralded,
        };
        Ok(())
    })
}

/// Net transmittance and loss of `len` surfaces in series.
///
/// # Safety
/// `transmittances` must point to `len` readable doubles (or be null with
/// `len == 0`); `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn herald_loss_budget(
    transmittances: *const f64,
    len: usize,
    out: *mut HeraldLossBudget,
) -> HeraldStatus {
    guard(|| {
        let out = out_ref(out)?;
        let surfaces = match (transmittances.is_null(), len) {
            (_, 0) => Vec::new(),
            (true, _) => return Err(fail(HeraldStatus::NullPointer, "null surface array")),
            (false, n) => std::slice::from_raw_parts(transmittances, n).to_vec(),
        };
        let b = loss_budget(&LossModel::new(surfaces).status()?);
        *out = HeraldLossBudget {
            net_transmittance: b.net_transmittance,
            net_loss: b.net_loss,
        };
        Ok(())
    })
}

fn finish(estimates: Vec<SimulationEstimate>) -> Result<*mut HeraldSimulation, HeraldStatus> {
    let names = estimates
        .iter()
        .map(|e| CString::new(e.name.as_str()))
        .collect::<Result<_, _>>()
        .map_err(|_| fail(HeraldStatus::Panic, "estimate name contains NUL"))?;
    Ok(Box::into_raw(Box::new(HeraldSimulation { estimates, names })))
}

/// Run the delay-multiplexed Monte Carlo.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn herald_simulate_delay(
    cfg: *const HeraldConfig,
    trials: u64,
    seed: u64,
    out: *mut *mut HeraldSimulation,
) -> HeraldStatus {
    guard(|| {
        let cfg = *config_ref(cfg)?;
        let out = out_ref(out)?;
        let spec = SimulationSpec::delay_multiplexed(cfg, trials, seed).status()?;
        *out = finish(run_delay_multiplexed(&spec).status()?.estimates)?;
        Ok(())
    })
}

/// Run the switched-array Monte Carlo.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn herald_simulate_array(
    cfg: *const HeraldConfig,
    trials: u64,
    seed: u64,
    switch_transmittance: f64,
    output_transmittance: f64,
    out: *mut *mut HeraldSimulation,
) -> HeraldStatus {
    guard(|| {
        let cfg = *config_ref(cfg)?;
        let out = out_ref(out)?;
        let spec = SimulationSpec::switched_array(
            cfg,
            trials,
            seed,
            switch_transmittance,
            output_transmittance,
        )
        .status()?;
        *out = finish(run_switched_array(&spec).status()?.estimates)?;
        Ok(())
    })
}

/// Number of estimates in a run, 0 for null.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn herald_simulation_len(sim: *const HeraldSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.estimates.len())
}

/// # Safety
/// `sim` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn herald_simulation_get(
    sim: *const HeraldSimulation,
    index: usize,
    out: *mut HeraldEstimate,
) -> HeraldStatus {
    guard(|| {
        let sim = sim
            .as_ref()
            .ok_or_else(|| fail(HeraldStatus::NullPointer, "null simulation"))?;
        let out = out_ref(out)?;
        let e = sim.estimates.get(index).ok_or_else(|| {
            fail(
                HeraldStatus::InvalidArgument,
                &format!("estimate index {index} out of range 0..{}", sim.estimates.len()),
            )
        })?;
        *out = HeraldEstimate {
            name: sim.names[index].as_ptr(),
            delay: e.delay,
            numerator: e.numerator,
            denominator: e.denominator,
            defined: e.estimate.is_some(),
            estimate: e.estimate.unwrap_or(f64::NAN),
            standard_error: e.standard_error.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// # Safety
/// `sim` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn herald_simulation_free(sim: *mut HeraldSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Analytic sweep with default grids for `target` ("fig3a", "fig3b",
/// "fig4", "fig5"), written as CSV into a new string.
///
/// # Safety
/// `target` must be a NUL-terminated string; `out` must be valid for a
/// pointer write. Free the result with [`herald_string_free`].
#[no_mangle]
pub unsafe extern "C" fn herald_sweep_csv(
    target: *const c_char,
    kind: HeraldKind,
    out: *mut *mut c_char,
) -> HeraldStatus {
    guard(|| {
        let out = out_ref(out)?;
        if target.is_null() {
            return Err(fail(HeraldStatus::NullPointer, "null target"));
        }
        let name = CStr::from_ptr(target)
            .to_str()
            .map_err(|_| fail(HeraldStatus::InvalidArgument, "target is not UTF-8"))?;
        let target: SweepTarget = name.parse().status()?;
        let mut spec = SweepSpec::defaults(target);
        spec.kind = kind.into();
        let rows = run_sweep(&spec).status()?;
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).status()?;
        let s = CString::new(buf).map_err(|_| fail(HeraldStatus::Io, "CSV contains NUL"))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn herald_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

