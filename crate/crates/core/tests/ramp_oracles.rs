use proptest::prelude::*;

use feshbach::ramp::{write_ramp_csv, RAMP_CSV_HEADER};
use feshbach::{Dimension, InteractionRamp, Protocol, ScalingProtocol};

fn dim_of(d: u32) -> Dimension {
    Dimension::try_from(d).unwrap()
}

/// Coefficients (in powers of `s`) of `a(s) = 1 + delta (10 s^3 - 15 s^4 + 6 s^5)`.
fn a_poly(delta: f64) -> Vec<f64> {
    vec![1.0, 0.0, 0.0, 10.0 * delta, -15.0 * delta, 6.0 * delta]
}

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn poly_derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect()
}

fn poly_integral(p: &[f64], s: f64) -> f64 {
    p.iter()
        .enumerate()
        .map(|(k, c)| c * s.powi(k as i32 + 1) / (k + 1) as f64)
        .sum()
}

fn poly_eval(p: &[f64], s: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

/// `tau(t) = T int_0^{t/T} a (a'' + a) ds` for the shortcut and
/// `T int a^2 ds` for the reference ramp, both polynomials in `s`.
fn exact_tau(g_i: f64, g_f: f64, t_f: f64, d: u32, kind: Protocol, t: f64) -> f64 {
    let delta = (g_f / g_i).powf(1.0 / (d as f64 + 2.0)) - 1.0;
    let a = a_poly(delta);
    let a2 = poly_mul(&a, &a);
    let integrand = match kind {
        Protocol::Tra => a2,
        Protocol::Sta => {
            let a_ddot: Vec<f64> = poly_derivative(&poly_derivative(&a))
                .iter()
                .map(|c| c / (t_f * t_f))
                .collect();
            let mut sum = poly_mul(&a, &a_ddot);
            sum.resize(a2.len(), 0.0);
            sum.iter().zip(&a2).map(|(x, y)| x + y).collect()
        }
    };
    t_f * poly_integral(&integrand, t / t_f)
}

/// Closed-form interaction evaluated independently of the library.
fn g_closed_form(g_i: f64, g_f: f64, t_f: f64, d: u32, kind: Protocol, t: f64) -> f64 {
    let delta = (g_f / g_i).powf(1.0 / (d as f64 + 2.0)) - 1.0;
    let a = a_poly(delta);
    let s = t / t_f;
    let av = poly_eval(&a, s);
    let add = poly_eval(&poly_derivative(&poly_derivative(&a)), s) / (t_f * t_f);
    match kind {
        Protocol::Sta => g_i * av.powi(d as i32 + 1) * (add + av),
        Protocol::Tra => g_i * av.powi(d as i32 + 2),
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for j in 1..n {
        sum += f(a + j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

#[test]
fn rescaled_time_matches_simpson_quadrature() {
    let (g_i, g_f, t_f) = (1.0, 0.8, 1.0);
    let p = ScalingProtocol::new(g_i, g_f, t_f, Dimension::One, Protocol::Sta).unwrap();
    let integrand = |t: f64| {
        let a = poly_eval(&a_poly(0.8f64.powf(1.0 / 3.0) - 1.0), t / t_f);
        g_closed_form(g_i, g_f, t_f, 1, Protocol::Sta, t) / (g_i * a)
    };
    let oracle = simpson(integrand, 0.0, t_f, 20_000);
    let tau = p.rescaled_time(t_f).unwrap();
    assert!((tau - oracle).abs() < 1e-8 * oracle, "tau = {tau}, simpson = {oracle}");
}

#[test]
fn rescaled_time_matches_exact_polynomial_integral() {
    for d in 1..=3 {
        for kind in [Protocol::Sta, Protocol::Tra] {
            for &(g_i, g_f, t_f) in &[(1.0, 0.8, 1.0), (2.0, 0.5, 0.3), (0.7, 1.9, 4.0)] {
                let p = ScalingProtocol::new(g_i, g_f, t_f, dim_of(d), kind).unwrap();
                for j in 0..=8 {
                    let t = t_f * j as f64 / 8.0;
                    let exact = exact_tau(g_i, g_f, t_f, d, kind, t);
                    let tau = p.rescaled_time(t).unwrap();
                    assert!(
                        (tau - exact).abs() <= 1e-12 * (1.0 + exact.abs()),
                        "d={d} {kind} t={t}: {tau} vs {exact}"
                    );
                }
            }
        }
    }
}

#[test]
fn equal_interactions_leave_time_unscaled() {
    let p = ScalingProtocol::new(1.3, 1.3, 2.0, Dimension::Three, Protocol::Sta).unwrap();
    for t in [0.0, 0.3, 1.1, 2.0] {
        assert!((p.rescaled_time(t).unwrap() - t).abs() < 1e-14);
        assert_eq!(p.interaction(t).unwrap(), 1.3);
    }
    let c = InteractionRamp::Constant(0.4);
    assert_eq!(c.at(17.0).unwrap(), 0.4);
}

#[test]
fn fast_one_dimensional_shortcut_dips_below_minus_g_i() {
    let p = ScalingProtocol::new(1.0, 0.8, 0.4, Dimension::One, Protocol::Sta).unwrap();
    let min = p
        .samples(2001)
        .unwrap()
        .iter()
        .map(|s| s.g)
        .fold(f64::INFINITY, f64::min);
    assert!(min < -1.0, "min g = {min}");
}

#[test]
fn csv_export_is_fixed_width_and_parseable() {
    let p = ScalingProtocol::new(1.0, 0.8, 0.1, Dimension::Three, Protocol::Sta).unwrap();
    let samples = p.samples(11).unwrap();
    let mut buf = Vec::new();
    write_ramp_csv(&mut buf, &samples).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(RAMP_CSV_HEADER));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    for (row, s) in rows.iter().zip(&samples) {
        assert_eq!(row, &vec![s.t, s.a, s.a_dot, s.a_ddot, s.g, s.tau]);
    }
}

proptest! {
    #[test]
    fn ramp_endpoints_are_exact(d in 1u32..=3, g_i in 0.1f64..10.0, g_f in 0.1f64..10.0, t_f in 0.01f64..20.0) {
        for kind in [Protocol::Sta, Protocol::Tra] {
            let p = ScalingProtocol::new(g_i, g_f, t_f, dim_of(d), kind).unwrap();
            prop_assert!((p.interaction(0.0).unwrap() - g_i).abs() < 1e-12 * g_i.max(1.0));
            prop_assert!((p.interaction(t_f).unwrap() - g_f).abs() < 1e-12 * g_f.max(1.0));
            let end = p.scale_factor(t_f).unwrap();
            prop_assert!((end.a - (g_f / g_i).powf(1.0 / (d as f64 + 2.0))).abs() < 1e-14);
            prop_assert!(end.a_dot.abs() < 1e-12 && end.a_ddot.abs() < 1e-12);
        }
    }

    #[test]
    fn ramp_matches_closed_form(d in 1u32..=3, g_i in 0.1f64..10.0, g_f in 0.1f64..10.0, t_f in 0.01f64..20.0, s in 0.0f64..1.0) {
        for kind in [Protocol::Sta, Protocol::Tra] {
            let p = ScalingProtocol::new(g_i, g_f, t_f, dim_of(d), kind).unwrap();
            let expected = g_closed_form(g_i, g_f, t_f, d, kind, s * t_f);
            let g = p.interaction(s * t_f).unwrap();
            prop_assert!((g - expected).abs() <= 1e-10 * (1.0 + expected.abs()), "{} vs {}", g, expected);
        }
    }

    #[test]
    fn interaction_scales_linearly_with_g(d in 1u32..=3, g_i in 0.1f64..5.0, g_f in 0.1f64..5.0, c in 0.1f64..10.0, s in 0.0f64..1.0) {
        let t_f = 0.7;
        let p = ScalingProtocol::new(g_i, g_f, t_f, dim_of(d), Protocol::Sta).unwrap();
        let q = ScalingProtocol::new(c * g_i, c * g_f, t_f, dim_of(d), Protocol::Sta).unwrap();
        let (g, gc) = (p.interaction(s * t_f).unwrap(), q.interaction(s * t_f).unwrap());
        prop_assert!((gc - c * g).abs() <= 1e-12 * (1.0 + (c * g).abs()));
    }

    #[test]
    fn shortcut_correction_falls_as_inverse_square_duration(d in 1u32..=3, g_i in 0.1f64..5.0, g_f in 0.1f64..5.0, t_f in 0.05f64..5.0) {
        prop_assume!((g_f / g_i - 1.0).abs() > 1e-3);
        let gap = |t: f64| {
            let p = ScalingProtocol::new(g_i, g_f, t, dim_of(d), Protocol::Sta).unwrap();
            (0..=200).map(|j| t * j as f64 / 200.0).map(|x| (p.sta_ramp(x).unwrap() - p.tra_ramp(x).unwrap()).abs()).fold(0.0, f64::max)
        };
        let ratio = gap(t_f) / gap(2.0 * t_f);
        prop_assert!((ratio - 4.0).abs() < 1e-8, "ratio {}", ratio);
    }

    #[test]
    fn reference_compression_is_monotone(d in 1u32..=3, g_i in 0.5f64..5.0, frac in 0.05f64..0.99, t_f in 0.01f64..10.0) {
        let p = ScalingProtocol::new(g_i, frac * g_i, t_f, dim_of(d), Protocol::Tra).unwrap();
        let g: Vec<f64> = p.samples(101).unwrap().iter().map(|s| s.g).collect();
        prop_assert!(g.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn midpoint_values(d in 1u32..=3, g_i in 0.1f64..10.0, g_f in 0.1f64..10.0, t_f in 0.01f64..20.0) {
        let p = ScalingProtocol::new(g_i, g_f, t_f, dim_of(d), Protocol::Sta).unwrap();
        let mid = p.scale_factor(0.5 * t_f).unwrap();
        let af = p.a_final();
        prop_assert!((mid.a - 0.5 * (1.0 + af)).abs() < 1e-14);
        prop_assert!((mid.a_dot - 15.0 * (af - 1.0) / (8.0 * t_f)).abs() < 1e-12 * (1.0 + mid.a_dot.abs()));
        prop_assert!(mid.a_ddot.abs() < 1e-10 / (t_f * t_f));
    }
}
