use feshbach::engine::{run_cycle, run_stroke, sweep_cycles, CycleSpec, Direction, Energetics, SolverSettings};
use feshbach::gpe::{Geometry, SpatialGrid};
use feshbach::thomas_fermi::{adiabatic_efficiency, tf_energy};
use feshbach::{Dimension, Protocol};

fn small_1d() -> SolverSettings {
    SolverSettings::new(SpatialGrid::new(Geometry::Cartesian1D, 20.0, 1024).unwrap())
}

#[test]
fn thomas_fermi_energies_give_the_adiabatic_efficiency() {
    for (dim, (g_i, g_f), (n_i, n_f)) in [
        (Dimension::One, (1.0, 0.8), (1e4, 8e3)),
        (Dimension::Two, (2.0, 0.5), (5e3, 1e3)),
        (Dimension::Three, (1.0, 0.8), (1e4, 8e3)),
    ] {
        let e = |n, g| tf_energy(n, g, dim).unwrap();
        let corners = [e(n_i, g_i), e(n_i, g_f), e(n_f, g_f), e(n_f, g_i)];
        let adiabatic = Energetics::from_energies(corners[1], corners[3], corners, 1.0);
        let eta = adiabatic_efficiency(g_i, g_f, dim).unwrap();
        assert!(
            (adiabatic.eta - eta).abs() < 1e-12,
            "{dim:?}: {} vs {eta}",
            adiabatic.eta
        );
        assert!(adiabatic.q_plus > 0.0 && adiabatic.q_minus < 0.0);
        assert!((adiabatic.w_c + adiabatic.w_e + adiabatic.q_plus + adiabatic.q_minus).abs() < 1e-9 * adiabatic.q_plus);
        assert_eq!(adiabatic.tau_cycle, 2.0);
        assert!((adiabatic.power - -(adiabatic.w_c + adiabatic.w_e) / 2.0).abs() < 1e-15);
    }
}

#[test]
fn null_stroke_does_no_work() {
    let r = run_stroke(500.0, 1.0, 1.0, 0.5, Protocol::Sta, &small_1d()).unwrap();
    assert!(r.w_irr.abs() < 1e-8 * r.e_target);
    assert!(r.fidelity > 1.0 - 1e-8);
    assert!(!r.collapsed && !r.failed());
    assert_eq!(r.direction, Direction::Compression);
}

#[test]
fn shortcut_beats_reference_ramp_above_threshold() {
    let settings = small_1d();
    let sta = run_stroke(500.0, 1.0, 0.8, 1.0, Protocol::Sta, &settings).unwrap();
    let tra = run_stroke(500.0, 1.0, 0.8, 1.0, Protocol::Tra, &settings).unwrap();
    assert!(sta.fidelity > 1.0 - 1e-3, "F = {}", sta.fidelity);
    assert!(sta.w_irr < tra.w_irr);
    assert!(sta.w_irr >= -1e-8 * sta.e_target && !sta.w_irr_flagged);
    assert!(sta.norm_drift < 1e-8);

    let back = run_stroke(500.0, 0.8, 1.0, 1.0, Protocol::Sta, &settings).unwrap();
    assert_eq!(back.direction, Direction::Expansion);
    assert!(back.fidelity > 1.0 - 1e-3);
}

#[test]
fn degenerate_cycle_has_no_output() {
    let spec = CycleSpec {
        g_i: 1.0,
        g_f: 1.0,
        n_i: 500.0,
        n_f: 400.0,
    };
    let c = run_cycle(&spec, 0.5, Protocol::Sta, &small_1d()).unwrap();
    let e = &c.energetics;
    assert!(e.w_c.abs() < 1e-6 && e.w_e.abs() < 1e-6, "{e:?}");
    assert!(c.eta().abs() < 1e-6);
    assert!(e.q_plus > 0.0);
}

#[test]
fn cycle_specs_are_validated() {
    let settings = small_1d();
    for spec in [
        CycleSpec {
            g_i: 0.8,
            g_f: 1.0,
            n_i: 500.0,
            n_f: 400.0,
        },
        CycleSpec {
            g_i: 1.0,
            g_f: 0.8,
            n_i: 400.0,
            n_f: 500.0,
        },
        CycleSpec {
            g_i: 1.0,
            g_f: 0.0,
            n_i: 500.0,
            n_f: 400.0,
        },
    ] {
        assert!(run_cycle(&spec, 0.5, Protocol::Sta, &settings).is_err());
    }
    let ok = CycleSpec {
        g_i: 1.0,
        g_f: 0.8,
        n_i: 500.0,
        n_f: 400.0,
    };
    assert!(sweep_cycles(&ok, &[], &[Protocol::Sta], &settings, 1).is_err());
}

#[test]
fn sweep_is_deterministic_and_ratio_at_least_one() {
    let spec = CycleSpec {
        g_i: 1.0,
        g_f: 0.8,
        n_i: 1e4,
        n_f: 8e3,
    };
    let settings = SolverSettings::for_condensate(Geometry::Cartesian1D, spec.mu_max(Geometry::Cartesian1D).unwrap());
    let t_fs = [0.6, 1.0, 2.0];
    let protocols = [Protocol::Sta, Protocol::Tra];
    let a = sweep_cycles(&spec, &t_fs, &protocols, &settings, 1).unwrap();
    let b = sweep_cycles(&spec, &t_fs, &protocols, &settings, 2).unwrap();
    assert!((a.eta_ad - adiabatic_efficiency(1.0, 0.8, Dimension::One).unwrap()).abs() < 1e-15);
    for (x, y) in a.rows.iter().zip(&b.rows) {
        let (x, y) = (x.outcome.as_ref().unwrap(), y.outcome.as_ref().unwrap());
        assert_eq!(x.energetics, y.energetics);
    }
    let ratios = a.power_ratios();
    assert_eq!(ratios.len(), t_fs.len());
    for r in ratios {
        let sta = a.get(r.tau / 2.0, Protocol::Sta).unwrap();
        if !sta.collapsed() {
            assert!(r.ratio >= 1.0, "tau {}: ratio {}", r.tau, r.ratio);
        }
        assert!(sta.eta() <= a.eta_ad + 1e-4);
    }
}

#[test]
fn three_dimensional_shortcut_collapses_when_too_fast() {
    let mu = feshbach::thomas_fermi::chemical_potential(1e4, 1.0, Dimension::Three).unwrap();
    let settings = SolverSettings::for_condensate(Geometry::Radial3D, mu);
    match run_stroke(1e4, 1.0, 0.8, 0.03, Protocol::Sta, &settings) {
        Ok(r) => assert!(r.collapsed, "W/E = {}", r.relative_w_irr()),
        Err(feshbach::Error::Collapse { .. }) => {}
        Err(e) => panic!("{e}"),
    }
}
