//! C ABI over the solver.
//!
//! Networks and solutions are opaque heap handles owned by the caller and
//! released with their `_free` function. Every fallible call returns a
//! [`WsrStatus`]; on failure [`wsr_last_error`] describes the cause for the
//! calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wsr_minimax::duality::{certify_duality, Verdict};
use wsr_minimax::netmodel::{read_network, write_network, ConstraintSpec, Network, Scenario};
use wsr_minimax::solver::{solve, SolveOutput, SolverConfig, Termination};
use wsr_minimax::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidNetwork = 4,
    InvalidScenario = 5,
    InvalidConfig = 6,
    DimensionMismatch = 7,
    UnsupportedMode = 8,
    /// The iteration failed: infeasible start, bisection failure, a
    /// decreasing step and similar.
    Solver = 9,
    Io = 10,
    /// An index or buffer length is out of range.
    OutOfRange = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsrConstraintKind {
    Total = 0,
    PerLink = 1,
    Grouped = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsrTermination {
    KktConverged = 0,
    ObjectiveStalled = 1,
    MaxIterations = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsrVerdict {
    Pass = 0,
    Fail = 1,
    Degenerate = 2,
}

/// Parameters of a generated network. Only the fields of the chosen
/// constraint kind are read.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WsrScenario {
    pub links: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub interference_scale: f64,
    pub weight_min: f64,
    pub weight_max: f64,
    pub constraint: WsrConstraintKind,
    pub total_power: f64,
    pub perlink_min: u32,
    pub perlink_max: u32,
    pub cell_size: usize,
    pub cell_power: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WsrSolverConfig {
    pub max_iters: usize,
    /// Relative objective gain over three steps below which the run stops;
    /// zero disables the test.
    pub obj_tol: f64,
    pub kkt_tol: f64,
}

/// Opaque network handle.
pub struct WsrNetwork(Network);

/// Opaque result of a solve.
pub struct WsrSolution(SolveOutput);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> WsrStatus {
    match err {
        Error::Parse { .. } => WsrStatus::Parse,
        Error::InvalidNetwork(_) => WsrStatus::InvalidNetwork,
        Error::InvalidScenario(_) => WsrStatus::InvalidScenario,
        Error::Config(_) => WsrStatus::InvalidConfig,
        Error::DimensionMismatch(_) => WsrStatus::DimensionMismatch,
        Error::UnsupportedMode(_) => WsrStatus::UnsupportedMode,
        Error::Io(_) => WsrStatus::Io,
        _ => WsrStatus::Solver,
    }
}

struct Fail(WsrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, recording any error or panic for [`wsr_last_error`].
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> WsrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            WsrStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside wsr-minimax".into());
            WsrStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(WsrStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(WsrStatus::NullPointer, format!("{what} is null")))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn wsr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn wsr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Ten links, 3 transmit and 4 receive antennas, weights in `[0.5, 1]`,
/// total power 10.
#[no_mangle]
pub extern "C" fn wsr_scenario_reference(interference_scale: f64) -> WsrScenario {
    WsrScenario {
        links: 10,
        tx_antennas: 3,
        rx_antennas: 4,
        interference_scale,
        weight_min: 0.5,
        weight_max: 1.0,
        constraint: WsrConstraintKind::Total,
        total_power: 10.0,
        perlink_min: 1,
        perlink_max: 10,
        cell_size: 2,
        cell_power: 5.0,
    }
}

#[no_mangle]
pub extern "C" fn wsr_solver_config_default() -> WsrSolverConfig {
    let d = SolverConfig::default();
    WsrSolverConfig { max_iters: d.max_iters, obj_tol: d.obj_tol, kkt_tol: d.kkt_tol }
}

impl From<&WsrScenario> for Scenario {
    fn from(s: &WsrScenario) -> Self {
        let constraint = match s.constraint {
            WsrConstraintKind::Total => ConstraintSpec::Total { total_power: s.total_power },
            WsrConstraintKind::PerLink => ConstraintSpec::PerLink { min: s.perlink_min, max: s.perlink_max },
            WsrConstraintKind::Grouped => ConstraintSpec::Grouped {
                cell_size: s.cell_size,
                cell_power: s.cell_power,
                total_power: s.total_power,
            },
        };
        Scenario {
            links: s.links,
            tx_antennas: s.tx_antennas,
            rx_antennas: s.rx_antennas,
            interference_scale: s.interference_scale,
            weight_min: s.weight_min,
            weight_max: s.weight_max,
            constraint,
        }
    }
}

impl From<&WsrSolverConfig> for SolverConfig {
    fn from(c: &WsrSolverConfig) -> Self {
        SolverConfig { max_iters: c.max_iters, obj_tol: c.obj_tol, kkt_tol: c.kkt_tol, ..SolverConfig::default() }
    }
}

/// Draws a network from `scenario` with `seed`.
///
/// # Safety
/// `scenario` must be null or valid for reads and `out` null or valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn wsr_network_random(
    seed: u64,
    scenario: *const WsrScenario,
    out: *mut *mut WsrNetwork,
) -> WsrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let sc = Scenario::from(deref(scenario, "scenario")?);
        let net = wsr_minimax::netmodel::random_network(seed, &sc)?;
        *out = Box::into_raw(Box::new(WsrNetwork(net)));
        Ok(())
    })
}

/// Parses a network in the text format.
///
/// # Safety
/// `text` must be null or a NUL-terminated string; `out` null or valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn wsr_network_from_text(text: *const c_char, out: *mut *mut WsrNetwork) -> WsrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        if text.is_null() {
            return Err(Fail(WsrStatus::NullPointer, "text is null".into()));
        }
        let s = CStr::from_ptr(text).to_str().map_err(|e| Fail(WsrStatus::InvalidUtf8, e.to_string()))?;
        let net = read_network(s.as_bytes())?;
        *out = Box::into_raw(Box::new(WsrNetwork(net)));
        Ok(())
    })
}

/// Serializes a network; release the string with [`wsr_string_free`].
///
/// # Safety
/// `net` must be null or a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wsr_network_to_text(net: *const WsrNetwork, out: *mut *mut c_char) -> WsrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let net = deref(net, "network")?;
        let mut buf = Vec::new();
        write_network(&net.0, &mut buf)?;
        let s = CString::new(buf).map_err(|e| Fail(WsrStatus::Io, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// Number of links, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wsr_network_num_links(net: *const WsrNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.num_links())
}

/// # Safety
/// `net` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wsr_network_free(net: *mut WsrNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wsr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs the solver from the default start. A null `config` uses the
/// defaults.
///
/// # Safety
/// `net` must be null or a live handle, `config` null or valid for reads,
/// `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wsr_solve(
    net: *const WsrNetwork,
    config: *const WsrSolverConfig,
    out: *mut *mut WsrSolution,
) -> WsrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let net = deref(net, "network")?;
        let cfg = config.as_ref().map(SolverConfig::from).unwrap_or_default();
        let sol = solve(&net.0, None, &cfg)?;
        *out = Box::into_raw(Box::new(WsrSolution(sol)));
        Ok(())
    })
}

/// Weighted sum-rate in nats, or NaN for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wsr_solution_objective(sol: *const WsrSolution) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.0.objective)
}

/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wsr_solution_iterations(sol: *const WsrSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.0.iterations())
}

/// Largest KKT residual at the returned point, or NaN for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wsr_solution_kkt_residual(sol: *const WsrSolution) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.0.kkt.max())
}

/// # Safety
/// `sol` must be null or a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wsr_solution_termination(sol: *const WsrSolution, out: *mut WsrTermination) -> WsrStatus {
    guard(|| {
        let sol = deref(sol, "solution")?;
        *out_ptr(out, "out")? = match sol.0.termination {
            Termination::KktConverged => WsrTermination::KktConverged,
            Termination::ObjectiveStalled => WsrTermination::ObjectiveStalled,
            Termination::MaxIterations => WsrTermination::MaxIterations,
        };
        Ok(())
    })
}

/// Copies the dual prices, one per constraint group, into `buf`. `len`
/// must be at least the group count, which is written to `written`.
///
/// # Safety
/// `sol` must be null or a live handle, `buf` valid for `len` writes,
/// `written` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wsr_solution_prices(
    sol: *const WsrSolution,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> WsrStatus {
    guard(|| {
        let mu = &deref(sol, "solution")?.0.duals.mu;
        if let Some(w) = written.as_mut() {
            *w = mu.len();
        }
        if len < mu.len() {
            return Err(Fail(WsrStatus::OutOfRange, format!("buffer holds {len}, need {}", mu.len())));
        }
        if buf.is_null() && !mu.is_empty() {
            return Err(Fail(WsrStatus::NullPointer, "buffer is null".into()));
        }
        if !mu.is_empty() {
            std::slice::from_raw_parts_mut(buf, mu.len()).copy_from_slice(mu);
        }
        Ok(())
    })
}

/// # Safety
/// `sol` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wsr_solution_free(sol: *mut WsrSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Solves `net`, maps the result to the reciprocal network and checks that
/// both achieve the same weighted sum-rate. `objective_gap` may be null;
/// it receives NaN when the map is degenerate.
///
/// # Safety
/// `net` must be null or a live handle, `config` null or valid for reads,
/// `verdict` null or valid for writes, `objective_gap` null or valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn wsr_certify(
    net: *const WsrNetwork,
    config: *const WsrSolverConfig,
    verdict: *mut WsrVerdict,
    objective_gap: *mut f64,
) -> WsrStatus {
    guard(|| {
        let net = deref(net, "network")?;
        let verdict = out_ptr(verdict, "verdict")?;
        let cfg = config.as_ref().map(SolverConfig::from).unwrap_or_default();
        let report = certify_duality(&net.0, &cfg)?;
        *verdict = match report.verdict {
            Verdict::Pass => WsrVerdict::Pass,
            Verdict::Fail => WsrVerdict::Fail,
            Verdict::Degenerate => WsrVerdict::Degenerate,
        };
        if let Some(g) = objective_gap.as_mut() {
            *g = report.objective_gap.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}
