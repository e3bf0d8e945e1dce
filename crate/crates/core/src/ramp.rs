//! Scaling function `a(t)` and the interaction ramps built from it.
//!
//! All quantities are dimensionless (`hbar = m = omega = 1`). The scaling
//! factor follows the quintic "smoother step"
//!
//! ```text
//! a(t) = 1 + (a_f - 1) (10 s^3 - 15 s^4 + 6 s^5),   s = t / T_f,
//! ```
//!
//! with `a_f = (g_f / g_i)^(1 / (d + 2))`, so that `a`, `a'` and `a''` take
//! their adiabatic values at both ends of the stroke.
//!
//! The shortcut ramp reverse-engineered from the scaling ansatz in the
//! Thomas-Fermi limit is `g(t) = g_i a^(d+1) (a'' + a)`; the time-rescaled
//! adiabatic reference drops the `a''` term.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{default_rule, DEFAULT_PANELS};
use crate::output::fmt_f64;

/// Spatial dimension of an isotropic harmonic trap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Dimension {
    One,
    Two,
    Three,
}

impl Dimension {
    pub const ALL: [Dimension; 3] = [Dimension::One, Dimension::Two, Dimension::Three];

    pub fn get(self) -> u32 {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.get() as f64
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;

    fn try_from(d: u32) -> Result<Self> {
        match d {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            _ => Err(Error::invalid(format!("dimension must be 1, 2 or 3, got {d}"))),
        }
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.get()
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.get())
    }
}

/// Which interaction ramp a stroke is driven with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    /// Shortcut to adiabaticity, `g = g_i a^(d+1) (a'' + a)`.
    #[serde(rename = "STA")]
    Sta,
    /// Time-rescaled adiabatic reference, `g = g_i a^(d+2)`.
    #[serde(rename = "TRA")]
    Tra,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Sta => "STA",
            Protocol::Tra => "TRA",
        })
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sta" => Ok(Protocol::Sta),
            "tra" => Ok(Protocol::Tra),
            _ => Err(Error::invalid(format!("unknown protocol '{s}'"))),
        }
    }
}

/// `a(t)` together with its first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFactor {
    pub a: f64,
    pub a_dot: f64,
    pub a_ddot: f64,
}

/// One row of a sampled ramp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampSample {
    pub t: f64,
    pub a: f64,
    pub a_dot: f64,
    pub a_ddot: f64,
    pub g: f64,
    pub tau: f64,
}

/// Boundary data of a single work stroke.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingProtocol {
    g_i: f64,
    g_f: f64,
    t_f: f64,
    dim: Dimension,
    kind: Protocol,
}

// Slack on the time domain so that float accumulation of step midpoints
// and endpoints never trips the domain check.
const T_SLACK: f64 = 1e-12;

impl ScalingProtocol {
    pub fn new(g_i: f64, g_f: f64, t_f: f64, dim: Dimension, kind: Protocol) -> Result<Self> {
        if !(g_i > 0.0 && g_i.is_finite()) {
            return Err(Error::invalid(format!("g_i must be positive, got {g_i}")));
        }
        if !(g_f > 0.0 && g_f.is_finite()) {
            return Err(Error::invalid(format!("g_f must be positive, got {g_f}")));
        }
        if !(t_f > 0.0 && t_f.is_finite()) {
            return Err(Error::invalid(format!("T_f must be positive, got {t_f}")));
        }
        Ok(Self {
            g_i,
            g_f,
            t_f,
            dim,
            kind,
        })
    }

    pub fn g_i(&self) -> f64 {
        self.g_i
    }

    pub fn g_f(&self) -> f64 {
        self.g_f
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn kind(&self) -> Protocol {
        self.kind
    }

    pub fn with_kind(self, kind: Protocol) -> Self {
        Self { kind, ..self }
    }

    pub fn with_duration(self, t_f: f64) -> Result<Self> {
        Self::new(self.g_i, self.g_f, t_f, self.dim, self.kind)
    }

    /// Final scaling factor `(g_f / g_i)^(1 / (d + 2))`; the initial one is 1.
    pub fn a_final(&self) -> f64 {
        (self.g_f / self.g_i).powf(1.0 / (self.dim.as_f64() + 2.0))
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        let slack = T_SLACK * self.t_f;
        if !(t >= -slack && t <= self.t_f + slack) {
            return Err(Error::domain(format!("t = {t} outside [0, {}]", self.t_f)));
        }
        Ok(t.clamp(0.0, self.t_f))
    }

    /// Scaling factor in terms of the reduced time `s = t / T_f`, skipping
    /// the domain check.
    pub(crate) fn scale_factor_at_s(&self, s: f64) -> ScaleFactor {
        let da = self.a_final() - 1.0;
        let tf = self.t_f;
        let s2 = s * s;
        let s3 = s2 * s;
        ScaleFactor {
            a: 1.0 + da * s3 * (10.0 - 15.0 * s + 6.0 * s2),
            a_dot: da * 30.0 * s2 * (1.0 - 2.0 * s + s2) / tf,
            a_ddot: da * 60.0 * s * (1.0 - 3.0 * s + 2.0 * s2) / (tf * tf),
        }
    }

    pub fn scale_factor(&self, t: f64) -> Result<ScaleFactor> {
        let t = self.check_time(t)?;
        Ok(self.scale_factor_at_s(t / self.t_f))
    }

    /// Shortcut ramp `g_i a^(d+1) (a'' + a)`, whatever the protocol's kind.
    pub fn sta_ramp(&self, t: f64) -> Result<f64> {
        let sf = self.scale_factor(t)?;
        Ok(self.g_i * sf.a.powi(self.dim.get() as i32 + 1) * (sf.a_ddot + sf.a))
    }

    /// Reference ramp `g_i a^(d+2)`, whatever the protocol's kind.
    pub fn tra_ramp(&self, t: f64) -> Result<f64> {
        let sf = self.scale_factor(t)?;
        Ok(self.g_i * sf.a.powi(self.dim.get() as i32 + 2))
    }

    /// Interaction strength of this protocol's own kind.
    pub fn interaction(&self, t: f64) -> Result<f64> {
        match self.kind {
            Protocol::Sta => self.sta_ramp(t),
            Protocol::Tra => self.tra_ramp(t),
        }
    }

    fn interaction_unchecked(&self, t: f64) -> f64 {
        let sf = self.scale_factor_at_s(t / self.t_f);
        let d = self.dim.get() as i32;
        match self.kind {
            Protocol::Sta => self.g_i * sf.a.powi(d + 1) * (sf.a_ddot + sf.a),
            Protocol::Tra => self.g_i * sf.a.powi(d + 2),
        }
    }

    /// `tau(t) = int_0^t g(t') / (g_i a^d(t')) dt'`.
    pub fn rescaled_time(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        let d = self.dim.get() as i32;
        let integrand = |u: f64| {
            let a = self.scale_factor_at_s(u / self.t_f).a;
            self.interaction_unchecked(u) / (self.g_i * a.powi(d))
        };
        Ok(default_rule().integrate(integrand, 0.0, t, DEFAULT_PANELS))
    }

    pub fn sample(&self, t: f64) -> Result<RampSample> {
        let sf = self.scale_factor(t)?;
        Ok(RampSample {
            t,
            a: sf.a,
            a_dot: sf.a_dot,
            a_ddot: sf.a_ddot,
            g: self.interaction(t)?,
            tau: self.rescaled_time(t)?,
        })
    }

    /// `points` equally spaced samples covering `[0, T_f]` inclusive.
    pub fn samples(&self, points: usize) -> Result<Vec<RampSample>> {
        if points < 2 {
            return Err(Error::invalid("a sampled ramp needs at least two points"));
        }
        (0..points)
            .map(|j| {
                let t = if j + 1 == points {
                    self.t_f
                } else {
                    self.t_f * j as f64 / (points - 1) as f64
                };
                self.sample(t)
            })
            .collect()
    }
}

/// Time-dependent interaction strength driving a propagation.
#[derive(Debug, Clone, PartialEq)]
pub enum InteractionRamp {
    Constant(f64),
    Scaling(ScalingProtocol),
    /// Piecewise-linear interpolation through `(t, g)` knots with increasing `t`.
    Sampled {
        t: Vec<f64>,
        g: Vec<f64>,
    },
}

impl InteractionRamp {
    pub fn sampled(t: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if t.len() != g.len() || t.len() < 2 {
            return Err(Error::invalid(
                "sampled ramp needs matching t/g with at least two knots",
            ));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("sampled ramp times must increase strictly"));
        }
        Ok(InteractionRamp::Sampled { t, g })
    }

    pub fn protocol(&self) -> Option<Protocol> {
        match self {
            InteractionRamp::Scaling(p) => Some(p.kind()),
            _ => None,
        }
    }

    /// `g(t)`. Scaling ramps reject times outside `[0, T_f]`; sampled ramps
    /// hold their end values.
    pub fn at(&self, t: f64) -> Result<f64> {
        match self {
            InteractionRamp::Constant(g) => Ok(*g),
            InteractionRamp::Scaling(p) => p.interaction(t),
            InteractionRamp::Sampled { t: ts, g } => {
                let j = ts.partition_point(|&x| x <= t);
                if j == 0 {
                    return Ok(g[0]);
                }
                if j == ts.len() {
                    return Ok(g[g.len() - 1]);
                }
                let w = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
                Ok(g[j - 1] + w * (g[j] - g[j - 1]))
            }
        }
    }
}

impl From<ScalingProtocol> for InteractionRamp {
    fn from(p: ScalingProtocol) -> Self {
        InteractionRamp::Scaling(p)
    }
}

pub const RAMP_CSV_HEADER: &str = "t,a,a_dot,a_ddot,g,tau";

pub fn write_ramp_csv<W: Write>(mut out: W, samples: &[RampSample]) -> Result<()> {
    writeln!(out, "{RAMP_CSV_HEADER}")?;
    for s in samples {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(s.t),
            fmt_f64(s.a),
            fmt_f64(s.a_dot),
            fmt_f64(s.a_ddot),
            fmt_f64(s.g),
            fmt_f64(s.tau)
        )?;
    }
    Ok(())
}
