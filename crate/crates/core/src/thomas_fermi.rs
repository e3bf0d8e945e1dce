//! Closed-form Thomas-Fermi results for an isotropic harmonic trap.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpe::{SpatialGrid, WaveFunction};
use crate::ramp::{Dimension, Protocol, ScalingProtocol};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TFState {
    pub n: f64,
    pub g: f64,
    pub dim: Dimension,
    pub mu: f64,
    pub energy: f64,
}

impl TFState {
    pub fn new(n: f64, g: f64, dim: Dimension) -> Result<Self> {
        Ok(Self {
            n,
            g,
            dim,
            mu: chemical_potential(n, g, dim)?,
            energy: tf_energy(n, g, dim)?,
        })
    }

    /// `sqrt(2 mu)`.
    pub fn radius(&self) -> f64 {
        (2.0 * self.mu).sqrt()
    }
}

fn check(n: f64, g: f64) -> Result<()> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::domain(format!("particle number must be positive, got {n}")));
    }
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::domain(format!("Thomas-Fermi profile needs g > 0, got {g}")));
    }
    Ok(())
}

/// Chemical potential fixed by `int (mu - |x|^2/2)_+ / g = N`.
pub fn chemical_potential(n: f64, g: f64, dim: Dimension) -> Result<f64> {
    check(n, g)?;
    let pi = std::f64::consts::PI;
    Ok(match dim {
        Dimension::One => (9.0 * n * n * g * g / 32.0).cbrt(),
        Dimension::Two => (n * g / pi).sqrt(),
        Dimension::Three => (15.0 * n * g / (16.0 * 2f64.sqrt() * pi)).powf(0.4),
    })
}

/// `E = N mu (d + 2) / (d + 4)`.
pub fn tf_energy(n: f64, g: f64, dim: Dimension) -> Result<f64> {
    let d = dim.as_f64();
    Ok(n * chemical_potential(n, g, dim)? * (d + 2.0) / (d + 4.0))
}

/// `n(x) = max(0, (mu - |x|^2/2) / g)` on the grid nodes.
pub fn tf_density(grid: &SpatialGrid, n: f64, g: f64) -> Result<Vec<f64>> {
    let mu = chemical_potential(n, g, grid.dimension())?;
    Ok(grid
        .coords()
        .into_iter()
        .map(|x| ((mu - 0.5 * x * x) / g).max(0.0))
        .collect())
}

pub(crate) fn tf_wavefunction(grid: &SpatialGrid, n: f64, g: f64, dim: Dimension) -> WaveFunction {
    let mu = chemical_potential(n, g, dim).unwrap_or(0.0);
    WaveFunction::from_fn(*grid, |x| Complex64::new(((mu - 0.5 * x * x) / g).max(0.0).sqrt(), 0.0))
}

/// Thomas-Fermi ground state sampled on the grid (not renormalised).
pub fn tf_ground_state(grid: &SpatialGrid, n: f64, g: f64) -> Result<WaveFunction> {
    check(n, g)?;
    Ok(tf_wavefunction(grid, n, g, grid.dimension()))
}

/// Scaling solution driven by the shortcut ramp,
///
/// ```text
/// psi(x, t) = a^(-d/2) exp(i a' x^2 / 2a) exp(-i mu_i tau(t))
///             sqrt(max(0, (mu_i - x^2 / 2a^2) / g_i)),
/// ```
///
/// with `mu_i` the chemical potential of `n` particles at `g_i`.
pub fn analytic_evolution(grid: &SpatialGrid, protocol: &ScalingProtocol, n: f64, t: f64) -> Result<WaveFunction> {
    if protocol.kind() != Protocol::Sta {
        return Err(Error::invalid("the scaling solution only holds for the shortcut ramp"));
    }
    if protocol.dim() != grid.dimension() {
        return Err(Error::invalid(format!(
            "protocol is {}D but the grid is {}D",
            protocol.dim(),
            grid.dimension()
        )));
    }
    let g_i = protocol.g_i();
    let mu_i = chemical_potential(n, g_i, protocol.dim())?;
    let sf = protocol.scale_factor(t)?;
    let tau = protocol.rescaled_time(t)?;
    let d = protocol.dim().as_f64();
    let prefactor = sf.a.powf(-0.5 * d);
    let global = Complex64::from_polar(1.0, -mu_i * tau);
    let chirp = sf.a_dot / (2.0 * sf.a);
    Ok(WaveFunction::from_fn(*grid, |x| {
        let amp = ((mu_i - 0.5 * x * x / (sf.a * sf.a)) / g_i).max(0.0).sqrt();
        global * Complex64::from_polar(prefactor * amp, chirp * x * x)
    }))
}

/// Exponent `gamma = 2 / (d + 2)` of the adiabatic Otto efficiency.
pub fn efficiency_exponent(dim: Dimension) -> f64 {
    2.0 / (dim.as_f64() + 2.0)
}

/// `eta_AD = 1 - (g_f / g_i)^gamma` for a cycle compressing at `g_i -> g_f`.
pub fn adiabatic_efficiency(g_i: f64, g_f: f64, dim: Dimension) -> Result<f64> {
    if !(g_i > 0.0 && g_f > 0.0) {
        return Err(Error::domain("interaction strengths must be positive"));
    }
    if g_f > g_i {
        return Err(Error::domain(format!(
            "cycle needs g_f <= g_i, got g_f = {g_f} > g_i = {g_i}"
        )));
    }
    Ok(1.0 - (g_f / g_i).powf(efficiency_exponent(dim)))
}
