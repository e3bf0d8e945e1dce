//! Split-step Fourier propagation of the Gross-Pitaevskii equation
//!
//! ```text
//! i d_t psi = [ -lap/2 + |x|^2/2 + g(t) |psi|^2 ] psi
//! ```
//!
//! in imaginary time (ground states) and real time (strokes).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::grid::{Geometry, SpatialGrid};
use super::spectral::Spectral;
use super::wavefunction::WaveFunction;
use crate::error::{Error, Result};
use crate::ramp::InteractionRamp;
use crate::thomas_fermi;

/// Kinetic, trap and interaction contributions to the GPE energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub potential: f64,
    pub interaction: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential + self.interaction
    }

    /// `|2 E_kin - 2 E_pot + d E_int| / E`, zero for a stationary state.
    pub fn virial_residual(&self, d: f64) -> f64 {
        (2.0 * self.kinetic - 2.0 * self.potential + d * self.interaction).abs() / self.total().abs()
    }
}

/// Precomputed operators for one grid.
struct Operators {
    spectral: Spectral,
    potential: Vec<f64>,
    // 1 on Cartesian nodes, 1/r^2 on radial ones: |psi|^2 = weight |stored|^2
    density_weight: Vec<f64>,
}

impl Operators {
    fn new(grid: &SpatialGrid) -> Self {
        let density_weight = match grid.geometry() {
            Geometry::Cartesian1D => vec![1.0; grid.len()],
            Geometry::Radial3D => grid.coords().into_iter().map(|r| 1.0 / (r * r)).collect(),
        };
        Self {
            spectral: Spectral::new(grid),
            potential: grid.potential(),
            density_weight,
        }
    }

    fn energy_parts(&mut self, psi: &WaveFunction, g: f64) -> EnergyParts {
        let w = psi.grid().measure();
        let values = psi.values();
        let kinetic = w * self.spectral.kinetic_sum(values);
        let mut potential = 0.0;
        let mut interaction = 0.0;
        for ((v, pot), dw) in values.iter().zip(&self.potential).zip(&self.density_weight) {
            let n = v.norm_sqr();
            potential += pot * n;
            interaction += 0.5 * g * dw * n * n;
        }
        EnergyParts {
            kinetic,
            potential: w * potential,
            interaction: w * interaction,
        }
    }

    // psi <- exp(-z (V + g |psi|^2)) psi; returns the peak density seen
    fn nonlinear_step(&self, values: &mut [Complex64], g: f64, z: Complex64) -> f64 {
        let mut peak = 0.0f64;
        for ((v, pot), dw) in values.iter_mut().zip(&self.potential).zip(&self.density_weight) {
            let n = v.norm_sqr() * dw;
            peak = peak.max(n);
            *v *= (-z * (pot + g * n)).exp();
        }
        if peak.is_nan() {
            f64::NAN
        } else {
            peak
        }
    }
}

pub fn energy_parts(psi: &WaveFunction, g: f64) -> EnergyParts {
    Operators::new(psi.grid()).energy_parts(psi, g)
}

/// GPE energy functional with a spectral kinetic term.
pub fn energy(psi: &WaveFunction, g: f64) -> f64 {
    energy_parts(psi, g).total()
}

/// `|<psi|phi>|^2 / (|psi|^2 |phi|^2)`.
pub fn fidelity(psi: &WaveFunction, phi: &WaveFunction) -> Result<f64> {
    let overlap = psi.inner(phi)?;
    let denom = psi.norm() * phi.norm();
    if denom == 0.0 || !denom.is_finite() {
        return Ok(0.0);
    }
    Ok((overlap.norm_sqr() / denom).clamp(0.0, 1.0))
}

/// Excess energy `E(T_f) - E_f` of a stroke.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrreversibleWork {
    pub value: f64,
    /// Negative by more than `1e-8 E_f`: the final state lies below the
    /// supposed ground state, so one of the two is not converged.
    pub flagged: bool,
}

pub fn irreversible_work(e_final: f64, e_target: f64) -> IrreversibleWork {
    let value = e_final - e_target;
    IrreversibleWork {
        value,
        flagged: value < -1e-8 * e_target.abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundStateOptions {
    /// Tolerance on `|dE/E|` per unit imaginary time.
    pub tol: f64,
    pub max_iter: usize,
    pub dt: f64,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 400_000,
            dt: 1e-4,
        }
    }
}

const CHECK_EVERY: usize = 50;

/// Imaginary-time split-step relaxation, starting from the Thomas-Fermi
/// profile (a Gaussian when the condensate is too weakly interacting for
/// one) and renormalising to `n` particles after every step.
pub fn ground_state(grid: &SpatialGrid, g: f64, n: f64, opts: &GroundStateOptions) -> Result<WaveFunction> {
    if !(n > 0.0) {
        return Err(Error::invalid(format!("particle number must be positive, got {n}")));
    }
    if !(g >= 0.0) {
        return Err(Error::invalid(format!("ground states need g >= 0, got {g}")));
    }
    let psi = initial_guess(grid, g, n);
    relax(psi, g, n, opts)
}

/// Continues imaginary-time relaxation from an arbitrary state.
pub fn relax(mut psi: WaveFunction, g: f64, n: f64, opts: &GroundStateOptions) -> Result<WaveFunction> {
    let mut ops = Operators::new(psi.grid());
    let half = ops.spectral.kinetic_multiplier(Complex64::new(0.5 * opts.dt, 0.0));
    let z = Complex64::new(opts.dt, 0.0);
    psi.normalize_to(n);
    let mut e_prev = ops.energy_parts(&psi, g).total();
    let mut residual = f64::INFINITY;
    let mut iter = 0;
    while iter < opts.max_iter {
        for _ in 0..CHECK_EVERY {
            ops.spectral.apply(psi.values_mut(), &half);
            ops.nonlinear_step(psi.values_mut(), g, z);
            ops.spectral.apply(psi.values_mut(), &half);
            psi.normalize_to(n);
        }
        iter += CHECK_EVERY;
        let e = ops.energy_parts(&psi, g).total();
        if !e.is_finite() {
            return Err(Error::Convergence {
                iterations: iter,
                residual: f64::NAN,
            });
        }
        residual = (e - e_prev).abs() / e.abs() / (CHECK_EVERY as f64 * opts.dt);
        if residual < opts.tol {
            return Ok(psi);
        }
        e_prev = e;
    }
    Err(Error::Convergence {
        iterations: iter,
        residual,
    })
}

fn initial_guess(grid: &SpatialGrid, g: f64, n: f64) -> WaveFunction {
    let d = grid.dimension();
    if g > 0.0 {
        if let Ok(mu) = thomas_fermi::chemical_potential(n, g, d) {
            if (2.0 * mu).sqrt() > 8.0 * grid.spacing() {
                let mut psi = thomas_fermi::tf_wavefunction(grid, n, g, d);
                psi.normalize_to(n);
                return psi;
            }
        }
    }
    // deliberately not the oscillator ground state
    let mut psi = WaveFunction::from_fn(*grid, |x| Complex64::new((-x * x / 3.0).exp(), 0.0));
    psi.normalize_to(n);
    psi
}

/// Explicit white noise added to the initial state of a propagation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Noise {
    /// Standard deviation relative to the peak amplitude `sqrt(max |psi|^2)`.
    pub amplitude: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationOptions {
    pub dt: f64,
    /// Approximate number of trajectory samples (the end points are always kept).
    pub samples: usize,
    /// Collapse is declared once the peak density exceeds this multiple of
    /// the initial peak density.
    pub collapse_factor: f64,
    pub noise: Option<Noise>,
}

impl PropagationOptions {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            samples: 100,
            collapse_factor: 2.0,
            noise: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub energy: f64,
    pub norm: f64,
    pub central_density: f64,
}

#[derive(Debug, Clone)]
pub struct Propagation {
    pub psi: WaveFunction,
    pub trajectory: Vec<TrajectoryPoint>,
    /// First time the peak density crossed the collapse threshold.
    pub collapse_time: Option<f64>,
    pub steps: usize,
    pub dt: f64,
}

impl Propagation {
    pub fn collapsed(&self) -> bool {
        self.collapse_time.is_some()
    }
}

/// Strang-split real-time evolution over `[0, t_f]`: half kinetic step in
/// momentum space, full trap-plus-interaction step with `g` taken at the step
/// midpoint, half kinetic step. Consecutive half steps are fused.
///
/// Returns [`Error::Collapse`] when the field stops being finite.
pub fn propagate(
    psi0: &WaveFunction,
    ramp: &InteractionRamp,
    t_f: f64,
    opts: &PropagationOptions,
) -> Result<Propagation> {
    let grid = *psi0.grid();
    if !(t_f > 0.0 && t_f.is_finite()) {
        return Err(Error::invalid(format!("propagation time must be positive, got {t_f}")));
    }
    let dt_max = grid.max_time_step();
    if !(opts.dt > 0.0) || opts.dt > dt_max * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "time step {} must lie in (0, {dt_max:e}]",
            opts.dt
        )));
    }
    let steps = ((t_f / opts.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let h = t_f / steps as f64;
    let stride = (steps / opts.samples.max(1)).max(1);

    let mut ops = Operators::new(&grid);
    let half = ops.spectral.kinetic_multiplier(Complex64::new(0.0, 0.5 * h));
    let full = ops.spectral.kinetic_multiplier(Complex64::new(0.0, h));
    let z = Complex64::new(0.0, h);

    let mut psi = psi0.clone();
    if let Some(noise) = opts.noise {
        add_noise(&mut psi, noise);
    }
    let peak0 = psi.peak_density();
    let threshold = opts.collapse_factor * peak0;
    let mut collapse_time = None;
    let mut trajectory = Vec::with_capacity(steps / stride + 2);
    let mut record = |ops: &mut Operators, psi: &WaveFunction, t: f64| -> Result<()> {
        let g = ramp.at(t)?;
        trajectory.push(TrajectoryPoint {
            t,
            energy: ops.energy_parts(psi, g).total(),
            norm: psi.norm(),
            central_density: psi.central_density(),
        });
        Ok(())
    };
    record(&mut ops, &psi, 0.0)?;

    ops.spectral.apply(psi.values_mut(), &half);
    for i in 0..steps {
        let t_mid = (i as f64 + 0.5) * h;
        let g = ramp.at(t_mid)?;
        let peak = ops.nonlinear_step(psi.values_mut(), g, z);
        if !peak.is_finite() {
            return Err(Error::Collapse { time: t_mid });
        }
        if collapse_time.is_none() && peak > threshold {
            collapse_time = Some(t_mid);
        }
        let last = i + 1 == steps;
        if last || (i + 1) % stride == 0 {
            ops.spectral.apply(psi.values_mut(), &half);
            let t = if last { t_f } else { (i + 1) as f64 * h };
            if !psi.is_finite() {
                return Err(Error::Collapse { time: t });
            }
            record(&mut ops, &psi, t)?;
            if !last {
                ops.spectral.apply(psi.values_mut(), &half);
            }
        } else {
            ops.spectral.apply(psi.values_mut(), &full);
        }
    }
    Ok(Propagation {
        psi,
        trajectory,
        collapse_time,
        steps,
        dt: h,
    })
}

fn add_noise(psi: &mut WaveFunction, noise: Noise) {
    let n = psi.norm();
    let scale = noise.amplitude * psi.peak_density().sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let grid = *psi.grid();
    let coords = grid.coords();
    for (v, x) in psi.values_mut().iter_mut().zip(coords) {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        let dv = Complex64::new(re, im) * scale;
        *v += match grid.geometry() {
            Geometry::Cartesian1D => dv,
            Geometry::Radial3D => dv * x,
        };
    }
    psi.normalize_to(n);
}
