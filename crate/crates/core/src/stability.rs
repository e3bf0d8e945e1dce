//! Modulational-instability speed limit of the shortcut ramp.
//!
//! Near the trap centre the scaling solution is a homogeneous condensate
//! with a time-dependent chemical potential
//! `mu(t) = mu_i (a a'' + a^2)`. While `mu(t) < 0` a cosine perturbation
//! with the optimal wave number `k = sqrt(2 |mu|)` grows at the rate
//! `|mu(t)|`, so the total amplification over a stroke is
//!
//! ```text
//! Delta = exp( int_0^T_f  mu~(t) dt ),   mu~ = max(0, -mu).
//! ```
//!
//! The stroke is taken to be unstable once `Delta` exceeds a threshold set by
//! the noise floor seeding the instability (`1e14` for double precision).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bisect, default_rule, dormand_prince, DEFAULT_PANELS};
use crate::ramp::{Dimension, Protocol, ScalingProtocol};
use crate::thomas_fermi::chemical_potential;

pub const DEFAULT_DELTA_CRIT: f64 = 1e14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityQuery {
    pub g_i: f64,
    pub g_f: f64,
    pub n: f64,
    pub dim: Dimension,
    pub delta_crit: f64,
    /// Search interval for `T_f`.
    pub bracket: (f64, f64),
}

impl StabilityQuery {
    pub fn new(g_i: f64, g_f: f64, n: f64, dim: Dimension) -> Self {
        Self {
            g_i,
            g_f,
            n,
            dim,
            delta_crit: DEFAULT_DELTA_CRIT,
            bracket: (1e-3, 10.0),
        }
    }

    pub fn with_delta_crit(self, delta_crit: f64) -> Self {
        Self { delta_crit, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta_crit > 1.0) {
            return Err(Error::invalid(format!(
                "Delta_crit must exceed 1, got {}",
                self.delta_crit
            )));
        }
        let (lo, hi) = self.bracket;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::invalid(format!("bad T_f bracket [{lo}, {hi}]")));
        }
        Ok(())
    }

    pub fn protocol(&self, t_f: f64) -> Result<ScalingProtocol> {
        ScalingProtocol::new(self.g_i, self.g_f, t_f, self.dim, Protocol::Sta)
    }

    pub fn initial_mu(&self) -> Result<f64> {
        chemical_potential(self.n, self.g_i, self.dim)
    }
}

/// `mu(t) = mu_i (a a'' + a^2)`; the reference ramp has `a'' = 0`.
pub fn effective_mu(protocol: &ScalingProtocol, mu_i: f64, t: f64) -> Result<f64> {
    let sf = protocol.scale_factor(t)?;
    let a_ddot = match protocol.kind() {
        Protocol::Sta => sf.a_ddot,
        Protocol::Tra => 0.0,
    };
    Ok(mu_i * (sf.a * a_ddot + sf.a * sf.a))
}

/// Instantaneous optimal growth rate: `|mu|` where `mu <= 0`, else 0.
pub fn mu_tilde(mu: f64) -> f64 {
    if mu <= 0.0 {
        mu.abs()
    } else {
        0.0
    }
}

const SIGN_SCAN: usize = 1024;

/// `int_0^T_f mu~(t) dt` for the shortcut ramp of duration `t_f`.
///
/// The integrand has kinks where `mu` changes sign; those roots are located
/// first and every attractive interval is integrated separately.
pub fn log_growth_factor(query: &StabilityQuery, t_f: f64) -> Result<f64> {
    let p = query.protocol(t_f)?;
    let mu_i = query.initial_mu()?;
    // mu / mu_i as a function of s = t / T_f
    let reduced = |s: f64| {
        let sf = p.scale_factor_at_s(s);
        sf.a * sf.a_ddot + sf.a * sf.a
    };
    let mut edges = vec![0.0];
    let mut prev = reduced(0.0);
    for j in 1..=SIGN_SCAN {
        let s = j as f64 / SIGN_SCAN as f64;
        let cur = reduced(s);
        if (prev < 0.0) != (cur < 0.0) {
            let lo = (j - 1) as f64 / SIGN_SCAN as f64;
            edges.push(bisect(reduced, lo, s, 1e-15)?);
        }
        prev = cur;
    }
    edges.push(1.0);
    let rule = default_rule();
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo || reduced(0.5 * (lo + hi)) >= 0.0 {
            continue;
        }
        total += rule.integrate(|s| mu_tilde(mu_i * reduced(s)), lo, hi, DEFAULT_PANELS);
    }
    Ok(total * t_f)
}

/// `Delta(T_f)`; overflows to infinity for very fast ramps, see
/// [`log_growth_factor`].
pub fn growth_factor(query: &StabilityQuery, t_f: f64) -> Result<f64> {
    Ok(log_growth_factor(query, t_f)?.exp())
}

const BRACKET_SCAN: usize = 160;

/// Shortest stroke with `Delta(T_f) <= Delta_crit`.
///
/// A log-spaced scan over the bracket locates the outermost (largest-`T_f`)
/// crossing, which is then refined by bisection. This also covers a
/// criterion that is not monotone in `T_f`. Returns 0 when the ramp never
/// exceeds the threshold inside the bracket.
pub fn min_stroke_time(query: &StabilityQuery) -> Result<f64> {
    query.validate()?;
    if query.g_f == query.g_i {
        return Ok(0.0);
    }
    let target = query.delta_crit.ln();
    let (lo, hi) = query.bracket;
    let ratio = (hi / lo).ln();
    let scan: Vec<(f64, f64)> = (0..=BRACKET_SCAN)
        .map(|j| {
            let t = lo * (ratio * j as f64 / BRACKET_SCAN as f64).exp();
            let t = if j == BRACKET_SCAN { hi } else { t };
            log_growth_factor(query, t).map(|l| (t, l))
        })
        .collect::<Result<_>>()?;
    let Some(outer) = scan.iter().rposition(|&(_, l)| l > target) else {
        return Ok(0.0);
    };
    if outer == scan.len() - 1 {
        return Err(Error::Bracket { lo, hi, scan });
    }
    let (a, b) = (scan[outer].0, scan[outer + 1].0);
    bisect(
        |t| log_growth_factor(query, t).map(|l| l - target).unwrap_or(f64::NAN),
        a,
        b,
        1e-10,
    )
}

/// Integrates the perturbation amplitude of a fixed-`k` cosine mode,
///
/// ```text
/// r'   = -mu(t) sin(2 phi) r
/// phi' = -(k^2/2 + 2 mu(t) cos^2 phi),
/// ```
///
/// over the stroke from `(r, phi) = (1, phase)` and returns `r(T_f) / r(0)`.
/// Equivalent to `u_re'' + k^2/2 (k^2/2 + 2 mu) u_re = 0`.
pub fn hill_growth(protocol: &ScalingProtocol, mu_i: f64, k: f64, phase: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::invalid(format!("wave number must be positive, got {k}")));
    }
    let half_k2 = 0.5 * k * k;
    let mu = |t: f64| effective_mu(protocol, mu_i, t.min(protocol.t_f())).unwrap_or(f64::NAN);
    // state: (ln r, phi)
    let rhs = |t: f64, y: &[f64; 2]| {
        let m = mu(t);
        let (s, c) = y[1].sin_cos();
        [-2.0 * m * s * c, -(half_k2 + 2.0 * m * c * c)]
    };
    let y = dormand_prince(rhs, 0.0, protocol.t_f(), [0.0, phase], 1e-8, 1e-10)?;
    Ok(y[0].exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_tilde_cases() {
        assert_eq!(mu_tilde(-3.0), 3.0);
        assert_eq!(mu_tilde(5.0), 0.0);
        assert_eq!(mu_tilde(0.0), 0.0);
    }

    #[test]
    fn effective_mu_endpoints() {
        let p = ScalingProtocol::new(1.0, 0.8, 0.3, Dimension::One, Protocol::Sta).unwrap();
        assert_eq!(effective_mu(&p, 300.0, 0.0).unwrap(), 300.0);
        let af = p.a_final();
        assert!((effective_mu(&p, 300.0, 0.3).unwrap() - 300.0 * af * af).abs() < 1e-12);
        let tra = p.with_kind(Protocol::Tra);
        for j in 0..=100 {
            assert!(effective_mu(&tra, 300.0, 0.3 * j as f64 / 100.0).unwrap() > 0.0);
        }
    }

    #[test]
    fn slow_ramps_never_amplify() {
        let q = StabilityQuery::new(1.0, 0.8, 1e4, Dimension::One);
        assert_eq!(growth_factor(&q, 5.0).unwrap(), 1.0);
        assert_eq!(log_growth_factor(&q, 0.8).unwrap(), 0.0);
    }

    #[test]
    fn equal_interactions_are_unconditionally_stable() {
        let q = StabilityQuery::new(1.0, 1.0, 1e4, Dimension::Three);
        assert_eq!(min_stroke_time(&q).unwrap(), 0.0);
    }

    #[test]
    fn bracket_failure_carries_scan() {
        let mut q = StabilityQuery::new(1.0, 0.8, 1e4, Dimension::One);
        q.bracket = (0.01, 0.2);
        match min_stroke_time(&q) {
            Err(Error::Bracket { scan, .. }) => assert_eq!(scan.len(), BRACKET_SCAN + 1),
            other => panic!("expected bracket error, got {other:?}"),
        }
        q.bracket = (0.6, 2.0);
        assert_eq!(min_stroke_time(&q).unwrap(), 0.0);
        assert!(min_stroke_time(&q.with_delta_crit(0.5)).is_err());
    }

    #[test]
    fn hill_rejects_bad_wave_number() {
        let p = ScalingProtocol::new(1.0, 0.8, 1.0, Dimension::One, Protocol::Sta).unwrap();
        assert!(hill_growth(&p, 300.0, 0.0, 0.3).is_err());
    }
}
