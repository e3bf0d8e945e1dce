//! Otto cycle of the Feshbach engine.
//!
//! Two work strokes ramp the interaction between `g_i` and `g_f` at fixed
//! particle number; two isochoric strokes change the particle number at fixed
//! interaction. The isochoric strokes are instantaneous and perfect: the
//! state is replaced by the ground state at the new `(N, g)` corner.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpe::{
    energy, fidelity, ground_state, irreversible_work, propagate, Geometry, GroundStateOptions, PropagationOptions,
    SpatialGrid, WaveFunction,
};
use crate::ramp::{InteractionRamp, Protocol, ScalingProtocol};
use crate::thomas_fermi::{adiabatic_efficiency, chemical_potential};

/// Relative irreversible work above which a stroke counts as destroyed by
/// the instability.
pub const W_IRR_SPIKE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub grid: SpatialGrid,
    pub propagation: PropagationOptions,
    pub ground_state: GroundStateOptions,
}

impl SolverSettings {
    pub fn new(grid: SpatialGrid) -> Self {
        Self {
            grid,
            propagation: PropagationOptions::new(grid.default_time_step()),
            ground_state: GroundStateOptions::default(),
        }
    }

    /// Default grid for the geometry, enlarged if needed to resolve
    /// condensates with chemical potential up to `mu_max`.
    pub fn for_condensate(geometry: Geometry, mu_max: f64) -> Self {
        Self::new(SpatialGrid::for_chemical_potential(geometry, mu_max))
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.propagation.dt = dt;
        self
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub psi: WaveFunction,
    pub n: f64,
    pub g: f64,
    pub energy: f64,
}

impl GroundState {
    pub fn compute(settings: &SolverSettings, n: f64, g: f64) -> Result<Self> {
        let psi = ground_state(&settings.grid, g, n, &settings.ground_state)?;
        let energy = energy(&psi, g);
        Ok(Self { psi, n, g, energy })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Ramp towards weaker interactions.
    Compression,
    Expansion,
}

impl Direction {
    pub fn of(g_from: f64, g_to: f64) -> Self {
        if g_to <= g_from {
            Direction::Compression
        } else {
            Direction::Expansion
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Compression => "compression",
            Direction::Expansion => "expansion",
        })
    }
}

/// End-of-stroke observables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrokeResult {
    pub t_f: f64,
    pub protocol: Protocol,
    pub direction: Direction,
    pub n: f64,
    pub e_final: f64,
    pub e_target: f64,
    pub w_irr: f64,
    pub w_irr_flagged: bool,
    pub fidelity: f64,
    pub collapsed: bool,
    pub collapse_time: Option<f64>,
    pub norm_drift: f64,
    pub wall_time: f64,
}

impl StrokeResult {
    pub fn relative_w_irr(&self) -> f64 {
        self.w_irr / self.e_target
    }

    /// Collapsed, or irreversible work past [`W_IRR_SPIKE`].
    pub fn failed(&self) -> bool {
        self.collapsed || !(self.relative_w_irr() <= W_IRR_SPIKE)
    }
}

/// Propagates `initial` under the chosen ramp and compares against `target`.
pub fn run_stroke_between(
    initial: &GroundState,
    target: &GroundState,
    t_f: f64,
    protocol: Protocol,
    settings: &SolverSettings,
) -> Result<StrokeResult> {
    if initial.n != target.n {
        return Err(Error::invalid("work strokes keep the particle number fixed"));
    }
    let dim = settings.grid.dimension();
    let scaling = ScalingProtocol::new(initial.g, target.g, t_f, dim, protocol)?;
    let start = Instant::now();
    let direction = Direction::of(initial.g, target.g);
    let outcome = propagate(
        &initial.psi,
        &InteractionRamp::Scaling(scaling),
        t_f,
        &settings.propagation,
    );
    let result = match outcome {
        Ok(prop) => {
            let e_final = energy(&prop.psi, target.g);
            let w = irreversible_work(e_final, target.energy);
            StrokeResult {
                t_f,
                protocol,
                direction,
                n: initial.n,
                e_final,
                e_target: target.energy,
                w_irr: w.value,
                w_irr_flagged: w.flagged,
                fidelity: fidelity(&prop.psi, &target.psi)?,
                collapsed: prop.collapsed(),
                collapse_time: prop.collapse_time,
                norm_drift: (prop.psi.norm() - initial.psi.norm()).abs() / initial.psi.norm(),
                wall_time: 0.0,
            }
        }
        Err(Error::Collapse { time }) => StrokeResult {
            t_f,
            protocol,
            direction,
            n: initial.n,
            e_final: f64::INFINITY,
            e_target: target.energy,
            w_irr: f64::INFINITY,
            w_irr_flagged: false,
            fidelity: 0.0,
            collapsed: true,
            collapse_time: Some(time),
            norm_drift: f64::NAN,
            wall_time: 0.0,
        },
        Err(e) => return Err(e),
    };
    Ok(StrokeResult {
        wall_time: start.elapsed().as_secs_f64(),
        ..result
    })
}

/// Single stroke from the `(n, g_from)` ground state, judged against the
/// `(n, g_to)` ground state.
pub fn run_stroke(
    n: f64,
    g_from: f64,
    g_to: f64,
    t_f: f64,
    protocol: Protocol,
    settings: &SolverSettings,
) -> Result<StrokeResult> {
    let (initial, target) = rayon::join(
        || GroundState::compute(settings, n, g_from),
        || GroundState::compute(settings, n, g_to),
    );
    run_stroke_between(&initial?, &target?, t_f, protocol, settings)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleSpec {
    pub g_i: f64,
    pub g_f: f64,
    pub n_i: f64,
    pub n_f: f64,
}

impl CycleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.g_i > 0.0 && self.g_f > 0.0 && self.g_f <= self.g_i) {
            return Err(Error::invalid(format!(
                "cycle needs 0 < g_f <= g_i, got g_i = {}, g_f = {}",
                self.g_i, self.g_f
            )));
        }
        if !(self.n_f > 0.0 && self.n_f < self.n_i) {
            return Err(Error::invalid(format!(
                "cycle needs 0 < N_f < N_i, got N_i = {}, N_f = {}",
                self.n_i, self.n_f
            )));
        }
        Ok(())
    }

    /// Largest chemical potential met on the cycle, at `(N_i, g_i)`.
    pub fn mu_max(&self, geometry: Geometry) -> Result<f64> {
        chemical_potential(self.n_i, self.g_i, geometry.dimension())
    }
}

/// Ground states at the four corners of the cycle.
#[derive(Debug, Clone)]
pub struct CycleCorners {
    pub ni_gi: GroundState,
    pub ni_gf: GroundState,
    pub nf_gf: GroundState,
    pub nf_gi: GroundState,
}

impl CycleCorners {
    pub fn compute(spec: &CycleSpec, settings: &SolverSettings) -> Result<Self> {
        spec.validate()?;
        let ((a, b), (c, d)) = rayon::join(
            || {
                rayon::join(
                    || GroundState::compute(settings, spec.n_i, spec.g_i),
                    || GroundState::compute(settings, spec.n_i, spec.g_f),
                )
            },
            || {
                rayon::join(
                    || GroundState::compute(settings, spec.n_f, spec.g_f),
                    || GroundState::compute(settings, spec.n_f, spec.g_i),
                )
            },
        );
        Ok(Self {
            ni_gi: a?,
            ni_gf: b?,
            nf_gf: c?,
            nf_gi: d?,
        })
    }
}

/// Work and heat of one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Energetics {
    pub w_c: f64,
    pub w_e: f64,
    pub q_plus: f64,
    pub q_minus: f64,
    pub eta: f64,
    pub power: f64,
    pub tau_cycle: f64,
}

impl Energetics {
    /// Works from the energies actually reached after each work stroke;
    /// heats from the ground-state corner energies `[E(N_i,g_i), E(N_i,g_f),
    /// E(N_f,g_f), E(N_f,g_i)]`.
    pub fn from_energies(e_after_compression: f64, e_after_expansion: f64, corners: [f64; 4], t_f: f64) -> Self {
        let [ni_gi, ni_gf, nf_gf, nf_gi] = corners;
        let w_c = e_after_compression - ni_gi;
        let w_e = e_after_expansion - nf_gf;
        let q_plus = ni_gi - nf_gi;
        let q_minus = nf_gf - ni_gf;
        let tau_cycle = 2.0 * t_f;
        Self {
            w_c,
            w_e,
            q_plus,
            q_minus,
            eta: -(w_c + w_e) / q_plus,
            power: -(w_c + w_e) / tau_cycle,
            tau_cycle,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleResult {
    pub t_f: f64,
    pub protocol: Protocol,
    pub energetics: Energetics,
    pub compression: StrokeResult,
    pub expansion: StrokeResult,
}

impl CycleResult {
    pub fn collapsed(&self) -> bool {
        self.compression.collapsed || self.expansion.collapsed
    }

    pub fn eta(&self) -> f64 {
        self.energetics.eta
    }

    pub fn power(&self) -> f64 {
        self.energetics.power
    }
}

/// One cycle with precomputed corners.
pub fn run_cycle_with(
    corners: &CycleCorners,
    t_f: f64,
    protocol: Protocol,
    settings: &SolverSettings,
) -> Result<CycleResult> {
    let compression = run_stroke_between(&corners.ni_gi, &corners.ni_gf, t_f, protocol, settings)?;
    let expansion = run_stroke_between(&corners.nf_gf, &corners.nf_gi, t_f, protocol, settings)?;
    let energetics = Energetics::from_energies(
        compression.e_final,
        expansion.e_final,
        [
            corners.ni_gi.energy,
            corners.ni_gf.energy,
            corners.nf_gf.energy,
            corners.nf_gi.energy,
        ],
        t_f,
    );
    Ok(CycleResult {
        t_f,
        protocol,
        energetics,
        compression,
        expansion,
    })
}

pub fn run_cycle(spec: &CycleSpec, t_f: f64, protocol: Protocol, settings: &SolverSettings) -> Result<CycleResult> {
    let corners = CycleCorners::compute(spec, settings)?;
    run_cycle_with(&corners, t_f, protocol, settings)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub t_f: f64,
    pub protocol: Protocol,
    pub outcome: std::result::Result<CycleResult, String>,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerRatio {
    pub tau: f64,
    pub p_sta: f64,
    pub p_tra: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleSweep {
    pub eta_ad: f64,
    pub rows: Vec<SweepRow>,
}

impl CycleSweep {
    pub fn get(&self, t_f: f64, protocol: Protocol) -> Option<&CycleResult> {
        self.rows
            .iter()
            .find(|r| r.t_f == t_f && r.protocol == protocol)
            .and_then(|r| r.outcome.as_ref().ok())
    }

    /// `P_STA / P_TRA` for every duration where both cycles completed.
    pub fn power_ratios(&self) -> Vec<PowerRatio> {
        let mut durations: Vec<f64> = Vec::new();
        for row in &self.rows {
            if !durations.contains(&row.t_f) {
                durations.push(row.t_f);
            }
        }
        durations
            .iter()
            .filter_map(|&t_f| {
                let sta = self.get(t_f, Protocol::Sta)?;
                let tra = self.get(t_f, Protocol::Tra)?;
                Some(PowerRatio {
                    tau: 2.0 * t_f,
                    p_sta: sta.power(),
                    p_tra: tra.power(),
                    ratio: sta.power() / tra.power(),
                })
            })
            .collect()
    }
}

/// Maps `f` over `items` on a pool of `jobs` workers, preserving input order.
pub fn parallel_map<T, R, F>(jobs: usize, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}

/// One cycle per `(T_f, protocol)`, rows ordered by `T_f` then protocol.
/// Failing rows are recorded and the sweep carries on.
pub fn sweep_cycles(
    spec: &CycleSpec,
    t_fs: &[f64],
    protocols: &[Protocol],
    settings: &SolverSettings,
    jobs: usize,
) -> Result<CycleSweep> {
    if t_fs.is_empty() || protocols.is_empty() {
        return Err(Error::invalid(
            "cycle sweep needs at least one duration and one protocol",
        ));
    }
    spec.validate()?;
    let eta_ad = adiabatic_efficiency(spec.g_i, spec.g_f, settings.grid.dimension())?;
    let corners = CycleCorners::compute(spec, settings)?;
    let work: Vec<(f64, Protocol)> = t_fs
        .iter()
        .flat_map(|&t| protocols.iter().map(move |&p| (t, p)))
        .collect();
    let rows = parallel_map(jobs, &work, |&(t_f, protocol)| {
        let start = Instant::now();
        let outcome = run_cycle_with(&corners, t_f, protocol, settings).map_err(|e| e.to_string());
        SweepRow {
            t_f,
            protocol,
            outcome,
            wall_time: start.elapsed().as_secs_f64(),
        }
    })?;
    Ok(CycleSweep { eta_ad, rows })
}

/// Collapse onset seen in the GPE itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservedThreshold {
    /// Largest scanned `T_f` whose shortcut stroke failed (0 if none did).
    pub t_f_min: f64,
    /// `(T_f, W_irr / E_f, F, collapsed)` for every stroke that was run.
    pub scan: Vec<(f64, f64, f64, bool)>,
}

const MAX_SCAN: usize = 400;

/// Scans shortcut strokes `g_i -> g_f` on the lattice `T_f = j * step`,
/// starting near `start`, and reports the largest failing duration (see
/// [`StrokeResult::failed`]).
pub fn observed_min_stroke_time(
    n: f64,
    g_i: f64,
    g_f: f64,
    settings: &SolverSettings,
    start: f64,
    step: f64,
) -> Result<ObservedThreshold> {
    if !(step > 0.0 && start > 0.0) {
        return Err(Error::invalid("scan start and step must be positive"));
    }
    let (initial, target) = rayon::join(
        || GroundState::compute(settings, n, g_i),
        || GroundState::compute(settings, n, g_f),
    );
    let (initial, target) = (initial?, target?);
    let mut scan = Vec::new();
    let mut run = |j: usize| -> Result<bool> {
        let t_f = j as f64 * step;
        let r = run_stroke_between(&initial, &target, t_f, Protocol::Sta, settings)?;
        scan.push((t_f, r.relative_w_irr(), r.fidelity, r.collapsed));
        Ok(r.failed())
    };
    let mut j = ((start / step).round() as usize).max(1);
    let t_f_min = if run(j)? {
        // walk up to the first stable stroke
        loop {
            if j > MAX_SCAN || !run(j + 1)? {
                break j as f64 * step;
            }
            j += 1;
        }
    } else {
        loop {
            if j <= 1 {
                break 0.0;
            }
            j -= 1;
            if run(j)? {
                break j as f64 * step;
            }
        }
    };
    Ok(ObservedThreshold { t_f_min, scan })
}
