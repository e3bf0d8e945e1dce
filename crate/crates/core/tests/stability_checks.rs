use feshbach::stability::{
    effective_mu, growth_factor, hill_growth, log_growth_factor, min_stroke_time, StabilityQuery,
};
use feshbach::thomas_fermi::chemical_potential;
use feshbach::{Dimension, Error, Protocol, ScalingProtocol};

/// `mu(t) / mu_i = a a'' + a^2` from the quintic, written out directly.
fn reduced_mu(g_i: f64, g_f: f64, t_f: f64, d: f64, s: f64) -> f64 {
    let delta = (g_f / g_i).powf(1.0 / (d + 2.0)) - 1.0;
    let a = 1.0 + delta * (10.0 * s.powi(3) - 15.0 * s.powi(4) + 6.0 * s.powi(5));
    let a_ddot = delta * (60.0 * s - 180.0 * s * s + 120.0 * s.powi(3)) / (t_f * t_f);
    a * a_ddot + a * a
}

fn log_delta_oracle(q: &StabilityQuery, t_f: f64) -> f64 {
    let mu_i = chemical_potential(q.n, q.g_i, q.dim).unwrap();
    let d = q.dim.as_f64();
    let n = 2_000_000;
    let f = |j: usize| (-mu_i * reduced_mu(q.g_i, q.g_f, t_f, d, j as f64 / n as f64)).max(0.0);
    // composite Simpson on s in [0, 1]
    let inner: f64 = (1..n).map(|j| f(j) * if j % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(0) + f(n) + inner) / (3.0 * n as f64) * t_f
}

fn one_d() -> StabilityQuery {
    StabilityQuery::new(1.0, 0.8, 1e4, Dimension::One)
}

#[test]
fn growth_integral_matches_dense_quadrature() {
    for (q, t_f) in [
        (one_d(), 0.3),
        (one_d(), 0.45),
        (StabilityQuery::new(2.0, 0.6, 1e4, Dimension::One), 0.5),
        (StabilityQuery::new(1.0, 0.8, 1e4, Dimension::Three), 0.04),
        (StabilityQuery::new(1.0, 0.5, 1e3, Dimension::Two), 0.1),
    ] {
        let ln = log_growth_factor(&q, t_f).unwrap();
        let oracle = log_delta_oracle(&q, t_f);
        assert!(
            (ln - oracle).abs() <= 1e-6 * oracle.max(1.0),
            "{q:?} T_f={t_f}: {ln} vs {oracle}"
        );
    }
}

#[test]
fn effective_mu_follows_the_scale_factor() {
    let p = ScalingProtocol::new(1.0, 0.8, 0.45, Dimension::One, Protocol::Sta).unwrap();
    for j in 0..=20 {
        let t = 0.45 * j as f64 / 20.0;
        let mu = effective_mu(&p, 300.0, t).unwrap();
        let expected = 300.0 * reduced_mu(1.0, 0.8, 0.45, 1.0, t / 0.45);
        assert!((mu - expected).abs() < 1e-10 * 300.0);
    }
}

#[test]
fn one_dimensional_reference_duration_sits_at_the_threshold() {
    let l10 = log_growth_factor(&one_d(), 0.45).unwrap() / std::f64::consts::LN_10;
    assert!((l10 - 14.0).abs() <= 1.0, "log10 Delta = {l10}");
}

#[test]
fn growth_factor_never_increases_with_duration() {
    for q in [one_d(), StabilityQuery::new(1.0, 0.8, 1e4, Dimension::Three)] {
        let values: Vec<f64> = (0..=390)
            .map(|j| 0.05 + 0.005 * j as f64)
            .map(|t| log_growth_factor(&q, t).unwrap())
            .collect();
        assert!(values.iter().all(|v| *v >= 0.0));
        assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{:?}", q.dim);
    }
}

#[test]
fn slow_ramps_have_no_attractive_interval() {
    assert_eq!(growth_factor(&one_d(), 5.0).unwrap(), 1.0);
    let same = StabilityQuery::new(1.0, 1.0, 1e4, Dimension::One);
    assert_eq!(growth_factor(&same, 0.01).unwrap(), 1.0);
}

#[test]
fn minimum_stroke_time_lands_on_the_threshold() {
    for q in [
        one_d(),
        StabilityQuery::new(1.0, 0.8, 1e4, Dimension::Three),
        StabilityQuery::new(2.0, 0.5, 1e4, Dimension::One),
    ] {
        let t = min_stroke_time(&q).unwrap();
        let ln = log_growth_factor(&q, t).unwrap();
        assert!((ln - q.delta_crit.ln()).abs() < 1e-6 * q.delta_crit.ln(), "{ln}");
        assert!(log_growth_factor(&q, t * (1.0 + 1e-4)).unwrap() < q.delta_crit.ln());
        assert!(log_growth_factor(&q, t * (1.0 - 1e-4)).unwrap() > q.delta_crit.ln());
    }
}

#[test]
fn minimum_stroke_time_grows_with_compression_depth() {
    for (g_i, d) in [(1.0, Dimension::One), (2.0, Dimension::One), (1.0, Dimension::Three)] {
        let times: Vec<f64> = (0..10)
            .map(|j| 0.5 + 0.05 * j as f64)
            .map(|frac| min_stroke_time(&StabilityQuery::new(g_i, frac * g_i, 1e4, d)).unwrap())
            .collect();
        assert!(times.windows(2).all(|w| w[1] < w[0]), "{times:?}");
    }
    assert_eq!(
        min_stroke_time(&StabilityQuery::new(1.0, 1.0, 1e4, Dimension::One)).unwrap(),
        0.0
    );
}

#[test]
fn minimum_stroke_time_rejects_bad_queries() {
    let q = one_d().with_delta_crit(0.5);
    assert!(matches!(min_stroke_time(&q), Err(Error::InvalidParameter(_))));
    let tight = StabilityQuery {
        bracket: (1e-3, 0.1),
        ..one_d()
    };
    assert!(matches!(min_stroke_time(&tight), Err(Error::Bracket { .. })));
}

/// Amplitude of `(u_re, u_im)` under
/// `u_re' = k^2/2 u_im`, `u_im' = -(k^2/2 + 2 mu) u_re`, by fixed-step RK4.
fn hill_oracle(p: &ScalingProtocol, mu_i: f64, k: f64, phase: f64) -> f64 {
    let steps = 200_000;
    let h = p.t_f() / steps as f64;
    let hk = 0.5 * k * k;
    let mu = |t: f64| effective_mu(p, mu_i, t.min(p.t_f())).unwrap();
    let f = |t: f64, y: [f64; 2]| [hk * y[1], -(hk + 2.0 * mu(t)) * y[0]];
    let mut y = [phase.cos(), phase.sin()];
    for j in 0..steps {
        let t = j as f64 * h;
        let k1 = f(t, y);
        let k2 = f(t + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f(t + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y[0].hypot(y[1])
}

#[test]
fn hill_growth_matches_linear_integration() {
    let mu_i = chemical_potential(1e4, 1.0, Dimension::One).unwrap();
    let p = ScalingProtocol::new(1.0, 0.8, 0.45, Dimension::One, Protocol::Sta).unwrap();
    for (k, phase) in [(5.0, 0.0), (20.0, 0.7), (30.0, 1.3)] {
        let r = hill_growth(&p, mu_i, k, phase).unwrap();
        let oracle = hill_oracle(&p, mu_i, k, phase);
        assert!((r - oracle).abs() < 1e-5 * oracle, "k={k}: {r} vs {oracle}");
    }
}

#[test]
fn hill_growth_stays_bounded_for_slow_ramps() {
    let mu_i = chemical_potential(1e4, 1.0, Dimension::One).unwrap();
    let p = ScalingProtocol::new(1.0, 0.8, 2.0, Dimension::One, Protocol::Sta).unwrap();
    // the band a fast ramp destabilises; softer modes carry a large static
    // ellipticity sqrt(1 + 4 mu / k^2) in (u_re, u_im)
    for k in [15.0, 20.0, 25.0, 30.0, 40.0] {
        for phase in [0.0, 0.5, 1.0] {
            assert!(hill_growth(&p, mu_i, k, phase).unwrap() <= 10.0);
        }
    }
}

#[test]
fn hill_growth_rises_as_ramps_shorten() {
    let mu_i = chemical_potential(1e4, 1.0, Dimension::One).unwrap();
    let durations = [0.7, 0.6, 0.5, 0.45, 0.4];
    let amplitudes: Vec<f64> = durations
        .iter()
        .map(|&t_f| {
            let p = ScalingProtocol::new(1.0, 0.8, t_f, Dimension::One, Protocol::Sta).unwrap();
            let mu_min = (0..=1000)
                .map(|j| effective_mu(&p, mu_i, t_f * j as f64 / 1000.0).unwrap())
                .fold(f64::INFINITY, f64::min);
            let k = (2.0 * mu_min.abs()).sqrt();
            // best over the initial phase
            (0..16)
                .map(|j| hill_growth(&p, mu_i, k, j as f64 * std::f64::consts::PI / 16.0).unwrap())
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(amplitudes.windows(2).all(|w| w[1] > w[0]), "{amplitudes:?}");
}

#[test]
fn hill_growth_is_bounded_beyond_the_unstable_band() {
    let mu_i = chemical_potential(1e4, 1.0, Dimension::One).unwrap();
    let p = ScalingProtocol::new(1.0, 0.8, 0.45, Dimension::One, Protocol::Sta).unwrap();
    let max_mu_tilde = (0..=1000)
        .map(|j| -effective_mu(&p, mu_i, 0.45 * j as f64 / 1000.0).unwrap())
        .fold(0.0, f64::max);
    let k = 2.0 * max_mu_tilde.sqrt() * 1.5;
    for phase in [0.0, 0.4, 0.8, 1.2] {
        assert!(hill_growth(&p, mu_i, k, phase).unwrap() <= 10.0);
    }
    assert!(hill_growth(&p, mu_i, 0.0, 0.0).is_err());
}
