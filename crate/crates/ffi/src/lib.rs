//! C ABI for the `feshbach` toolkit.
//!
//! Every fallible function returns an [`FbStatus`] and writes its result
//! through an out-pointer. On failure a description is available from
//! [`fb_last_error_message`] on the same thread. Objects are opaque handles
//! created by `fb_*_new` style functions and released with the matching
//! `fb_*_free`; passing NULL to a free function is a no-op.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use feshbach::engine::{run_stroke_between, GroundState, SolverSettings};
use feshbach::gpe::{energy, fidelity, Geometry, SpatialGrid, WaveFunction};
use feshbach::stability::{log_growth_factor, min_stroke_time, StabilityQuery};
use feshbach::thomas_fermi::{adiabatic_efficiency, chemical_potential, tf_energy};
use feshbach::{Dimension, Error, Protocol, ScalingProtocol};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Convergence = 4,
    Collapse = 5,
    Bracket = 6,
    Numerical = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbProtocolKind {
    Sta = 0,
    Tra = 1,
}

impl From<FbProtocolKind> for Protocol {
    fn from(k: FbProtocolKind) -> Self {
        match k {
            FbProtocolKind::Sta => Protocol::Sta,
            FbProtocolKind::Tra => Protocol::Tra,
        }
    }
}

/// Shortcut or reference ramp between two interaction strengths.
pub struct FbProtocol(ScalingProtocol);

/// Grid, time step and relaxation settings for the GPE solver.
pub struct FbSolver(SolverSettings);

/// Condensate wave function together with the interaction it relaxed at.
pub struct FbWaveFunction {
    state: GroundState,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FbScaleFactor {
    pub a: f64,
    pub a_dot: f64,
    pub a_ddot: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FbStrokeResult {
    pub w_irr: f64,
    pub fidelity: f64,
    pub e_final: f64,
    pub e_target: f64,
    /// 1 if the condensate collapsed during the stroke.
    pub collapsed: i32,
    /// NaN unless `collapsed`.
    pub collapse_time: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FbStatus {
    match e {
        Error::InvalidParameter(_) | Error::GridMismatch => FbStatus::InvalidArgument,
        Error::Domain(_) => FbStatus::Domain,
        Error::Convergence { .. } => FbStatus::Convergence,
        Error::Collapse { .. } => FbStatus::Collapse,
        Error::Bracket { .. } => FbStatus::Bracket,
        Error::Io(_) | Error::Json(_) => FbStatus::Io,
        _ => FbStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard<F>(f: F) -> FbStatus
where
    F: FnOnce() -> Result<(), FfiError>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FbStatus::Ok,
        Ok(Err(FfiError::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            FbStatus::NullPointer
        }
        Ok(Err(FfiError::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            FbStatus::Panic
        }
    }
}

enum FfiError {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for FfiError {
    fn from(e: Error) -> Self {
        FfiError::Core(e)
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, FfiError> {
    p.as_mut().ok_or(FfiError::Null(what))
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, FfiError> {
    p.as_ref().ok_or(FfiError::Null(what))
}

fn dimension(d: u32) -> Result<Dimension, FfiError> {
    Ok(Dimension::try_from(d)?)
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn fb_chemical_potential(n: f64, g: f64, dim: u32, mu: *mut f64) -> FbStatus {
    guard(|| {
        *out(mu, "mu")? = chemical_potential(n, g, dimension(dim)?)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_tf_energy(n: f64, g: f64, dim: u32, e: *mut f64) -> FbStatus {
    guard(|| {
        *out(e, "e")? = tf_energy(n, g, dimension(dim)?)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_adiabatic_efficiency(g_i: f64, g_f: f64, dim: u32, eta: *mut f64) -> FbStatus {
    guard(|| {
        *out(eta, "eta")? = adiabatic_efficiency(g_i, g_f, dimension(dim)?)?;
        Ok(())
    })
}

/// `ln Delta(t_f)` for the shortcut ramp.
#[no_mangle]
pub unsafe extern "C" fn fb_log_growth_factor(
    g_i: f64,
    g_f: f64,
    n: f64,
    dim: u32,
    t_f: f64,
    log_delta: *mut f64,
) -> FbStatus {
    guard(|| {
        let q = StabilityQuery::new(g_i, g_f, n, dimension(dim)?);
        *out(log_delta, "log_delta")? = log_growth_factor(&q, t_f)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_min_stroke_time(
    g_i: f64,
    g_f: f64,
    n: f64,
    dim: u32,
    delta_crit: f64,
    t_f_min: *mut f64,
) -> FbStatus {
    guard(|| {
        let q = StabilityQuery::new(g_i, g_f, n, dimension(dim)?).with_delta_crit(delta_crit);
        *out(t_f_min, "t_f_min")? = min_stroke_time(&q)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_protocol_new(
    g_i: f64,
    g_f: f64,
    t_f: f64,
    dim: u32,
    kind: FbProtocolKind,
    handle: *mut *mut FbProtocol,
) -> FbStatus {
    guard(|| {
        let slot = out(handle, "handle")?;
        let p = ScalingProtocol::new(g_i, g_f, t_f, dimension(dim)?, kind.into())?;
        *slot = Box::into_raw(Box::new(FbProtocol(p)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_protocol_free(handle: *mut FbProtocol) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

#[no_mangle]
pub unsafe extern "C" fn fb_protocol_scale_factor(
    handle: *const FbProtocol,
    t: f64,
    result: *mut FbScaleFactor,
) -> FbStatus {
    guard(|| {
        let sf = get(handle, "handle")?.0.scale_factor(t)?;
        *out(result, "result")? = FbScaleFactor {
            a: sf.a,
            a_dot: sf.a_dot,
            a_ddot: sf.a_ddot,
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_protocol_interaction(handle: *const FbProtocol, t: f64, g: *mut f64) -> FbStatus {
    guard(|| {
        *out(g, "g")? = get(handle, "handle")?.0.interaction(t)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_protocol_rescaled_time(handle: *const FbProtocol, t: f64, tau: *mut f64) -> FbStatus {
    guard(|| {
        *out(tau, "tau")? = get(handle, "handle")?.0.rescaled_time(t)?;
        Ok(())
    })
}

/// Solver on an explicit grid. `points == 0` or `extent <= 0` selects the
/// default for that parameter; `dt <= 0` selects the grid's default step.
#[no_mangle]
pub unsafe extern "C" fn fb_solver_new(
    dim: u32,
    extent: f64,
    points: usize,
    dt: f64,
    handle: *mut *mut FbSolver,
) -> FbStatus {
    guard(|| {
        let slot = out(handle, "handle")?;
        let geometry = Geometry::for_dimension(dimension(dim)?)?;
        let base = SpatialGrid::default_for(geometry);
        let extent = if extent > 0.0 { extent } else { base.extent() };
        let points = if points == 0 { base.points() } else { points };
        let mut settings = SolverSettings::new(SpatialGrid::new(geometry, extent, points)?);
        if dt > 0.0 {
            settings.propagation.dt = dt;
        }
        *slot = Box::into_raw(Box::new(FbSolver(settings)));
        Ok(())
    })
}

/// Solver on the default grid, enlarged to hold condensates up to `mu_max`.
#[no_mangle]
pub unsafe extern "C" fn fb_solver_for_condensate(dim: u32, mu_max: f64, handle: *mut *mut FbSolver) -> FbStatus {
    guard(|| {
        let slot = out(handle, "handle")?;
        let geometry = Geometry::for_dimension(dimension(dim)?)?;
        *slot = Box::into_raw(Box::new(FbSolver(SolverSettings::for_condensate(geometry, mu_max))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_solver_free(handle: *mut FbSolver) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

#[no_mangle]
pub unsafe extern "C" fn fb_solver_time_step(handle: *const FbSolver, dt: *mut f64) -> FbStatus {
    guard(|| {
        *out(dt, "dt")? = get(handle, "handle")?.0.propagation.dt;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_ground_state(
    solver: *const FbSolver,
    n: f64,
    g: f64,
    handle: *mut *mut FbWaveFunction,
) -> FbStatus {
    guard(|| {
        let slot = out(handle, "handle")?;
        let state = GroundState::compute(&get(solver, "solver")?.0, n, g)?;
        *slot = Box::into_raw(Box::new(FbWaveFunction { state }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_wavefunction_free(handle: *mut FbWaveFunction) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of stored grid values.
#[no_mangle]
pub unsafe extern "C" fn fb_wavefunction_len(handle: *const FbWaveFunction, len: *mut usize) -> FbStatus {
    guard(|| {
        *out(len, "len")? = get(handle, "handle")?.state.psi.values().len();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_wavefunction_norm(handle: *const FbWaveFunction, norm: *mut f64) -> FbStatus {
    guard(|| {
        *out(norm, "norm")? = get(handle, "handle")?.state.psi.norm();
        Ok(())
    })
}

/// Copies the stored values (`r psi` on radial grids) into `re` and `im`,
/// each of capacity `len`, which must equal [`fb_wavefunction_len`].
#[no_mangle]
pub unsafe extern "C" fn fb_wavefunction_values(
    handle: *const FbWaveFunction,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> FbStatus {
    guard(|| {
        let values = get(handle, "handle")?.state.psi.values();
        if len != values.len() {
            return Err(
                Error::InvalidParameter(format!("buffer length {len}, wave function has {}", values.len())).into(),
            );
        }
        if re.is_null() || im.is_null() {
            return Err(FfiError::Null("re/im"));
        }
        let re = std::slice::from_raw_parts_mut(re, len);
        let im = std::slice::from_raw_parts_mut(im, len);
        for ((r, i), v) in re.iter_mut().zip(im.iter_mut()).zip(values) {
            *r = v.re;
            *i = v.im;
        }
        Ok(())
    })
}

/// Energy of the wave function at interaction `g`.
#[no_mangle]
pub unsafe extern "C" fn fb_energy(handle: *const FbWaveFunction, g: f64, e: *mut f64) -> FbStatus {
    guard(|| {
        *out(e, "e")? = energy(&get(handle, "handle")?.state.psi, g);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_fidelity(a: *const FbWaveFunction, b: *const FbWaveFunction, f: *mut f64) -> FbStatus {
    guard(|| {
        let wf: &WaveFunction = &get(a, "a")?.state.psi;
        *out(f, "f")? = fidelity(wf, &get(b, "b")?.state.psi)?;
        Ok(())
    })
}

/// Propagates `initial` under the chosen ramp to `target.g` in time `t_f`
/// and reports the end-of-stroke observables against `target`.
#[no_mangle]
pub unsafe extern "C" fn fb_run_stroke(
    solver: *const FbSolver,
    initial: *const FbWaveFunction,
    target: *const FbWaveFunction,
    t_f: f64,
    kind: FbProtocolKind,
    result: *mut FbStrokeResult,
) -> FbStatus {
    guard(|| {
        let settings = &get(solver, "solver")?.0;
        let (initial, target) = (&get(initial, "initial")?.state, &get(target, "target")?.state);
        let slot = out(result, "result")?;
        let r = run_stroke_between(initial, target, t_f, kind.into(), settings)?;
        *slot = FbStrokeResult {
            w_irr: r.w_irr,
            fidelity: r.fidelity,
            e_final: r.e_final,
            e_target: r.e_target,
            collapsed: r.collapsed as i32,
            collapse_time: r.collapse_time.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}
