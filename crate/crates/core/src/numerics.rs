//! Small numerical building blocks shared by the ramp, stability and
//! Thomas-Fermi modules: composite Gauss-Legendre quadrature, bisection and
//! an adaptive Dormand-Prince integrator.

use crate::error::{Error, Result};

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Single-panel rule on `[a, b]`.
    pub fn panel<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Composite rule with `panels` equal panels on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64, panels: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|j| {
                let lo = a + h * j as f64;
                let hi = if j + 1 == panels { b } else { lo + h };
                self.panel(&mut f, lo, hi)
            })
            .sum()
    }
}

// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Default rule used for every smooth one-dimensional integral in the crate.
pub(crate) fn default_rule() -> &'static GaussLegendre {
    use std::sync::OnceLock;
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(8))
}

/// Number of panels used with [`default_rule`].
pub(crate) const DEFAULT_PANELS: usize = 64;

/// Bisection for a root of `f` in `[lo, hi]`, assuming `f(lo)` and `f(hi)`
/// have opposite signs. Stops when the bracket is narrower than
/// `rtol * max(|lo|, |hi|)` or after 200 halvings.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, rtol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.signum() != fhi.signum()) || flo.is_nan() || fhi.is_nan() {
        return Err(Error::domain(format!(
            "bisection needs a sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= rtol * lo.abs().max(hi.abs()) {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Adaptive Dormand-Prince 5(4) integration of `y' = f(t, y)` from `t0` to
/// `t1`. Error control is mixed absolute/relative per component.
pub fn dormand_prince<const N: usize, F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    rtol: f64,
    atol: f64,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    if span < 0.0 {
        return Err(Error::Integration("t1 must not precede t0".into()));
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = span / 100.0;
    let hmin = span * 1e-14;
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);
    let mut steps = 0usize;
    while t < t1 {
        if t + h > t1 {
            h = t1 - t;
        }
        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                *yi += h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let d5: f64 = (0..7).map(|j| B5[j] * k[j][i]).sum();
            let d4: f64 = (0..7).map(|j| B4[j] * k[j][i]).sum();
            y5[i] = y[i] + h * d5;
            let sc = atol + rtol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (d5 - d4)).abs() / sc);
        }
        if !err.is_finite() {
            return Err(Error::Integration(format!("non-finite state at t = {t}")));
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            k[0] = k[6];
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < hmin && t < t1 {
            return Err(Error::Integration(format!("step size underflow at t = {t}")));
        }
        steps += 1;
        if steps > 10_000_000 {
            return Err(Error::Integration("too many steps".into()));
        }
    }
    Ok(y)
}
