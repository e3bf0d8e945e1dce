use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::config::{Command, RunConfig};
use super::CliError;
use crate::engine::{
    observed_min_stroke_time, parallel_map, run_stroke_between, sweep_cycles, CycleSpec, Direction, GroundState,
    SolverSettings,
};
use crate::gpe::{energy_parts, write_snapshot};
use crate::output::{fmt_f64, write_csv, Manifest, RowTiming};
use crate::ramp::{write_ramp_csv, Protocol, ScalingProtocol};
use crate::stability::{min_stroke_time, StabilityQuery};
use crate::thomas_fermi::{chemical_potential, tf_energy};

const RAMP_SAMPLES: usize = 1001;
const STROKE_HEADER: &str = "T_f,protocol,direction,W_irr,F,collapsed";
const CYCLE_HEADER: &str = "tau,protocol,W_C,W_E,Q_plus,Q_minus,eta,P,collapsed";
const POWER_HEADER: &str = "tau,P_STA,P_TRA,ratio,eta_AD";
const STABILITY_HEADER: &str = "g_f,T_f_min_criterion,T_f_min_gpe";
/// Lattice spacing of the GPE threshold scan in `stability --verify-gpe`.
const VERIFY_STEP: f64 = 0.01;

/// Compact number for file names: `0.05`, `10000`, `2`.
fn tag(x: f64) -> String {
    format!("{x}")
}

fn proto_tag(p: Protocol) -> &'static str {
    match p {
        Protocol::Sta => "sta",
        Protocol::Tra => "tra",
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

struct Run {
    command: Command,
    out: PathBuf,
    manifest: Manifest,
    files: Vec<PathBuf>,
    start: Instant,
}

impl Run {
    fn begin(command: Command, cfg: &RunConfig, extra: serde_json::Value) -> Result<Self, CliError> {
        fs::create_dir_all(&cfg.out).map_err(|e| io_err(&cfg.out, e))?;
        let mut config = json!({ "run": cfg });
        if let (Some(map), serde_json::Value::Object(extra)) = (config.as_object_mut(), extra) {
            map.extend(extra);
        }
        Ok(Self {
            command,
            out: cfg.out.clone(),
            manifest: Manifest::new(command.name(), config),
            files: Vec::new(),
            start: Instant::now(),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn record(&mut self, path: PathBuf) {
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        self.manifest.files.push(name);
        self.files.push(path);
    }

    fn csv(&mut self, name: &str, header: &str, rows: &[Vec<String>]) -> Result<(), CliError> {
        let path = self.path(name);
        write_csv(&path, header, rows).map_err(|e| io_err(&path, e))?;
        self.record(path);
        Ok(())
    }

    fn timing(&mut self, label: String, wall_time: f64) {
        self.manifest.rows.push(RowTiming { label, wall_time });
    }

    fn finish(mut self) -> Result<Vec<PathBuf>, CliError> {
        self.manifest.total_wall_time = self.start.elapsed().as_secs_f64();
        let path = self.path(&format!("{}_manifest.json", self.command.name()));
        self.manifest.write(&path).map_err(|e| io_err(&path, e))?;
        self.files.push(path);
        Ok(self.files)
    }
}

fn solver_json(settings: &SolverSettings) -> serde_json::Value {
    json!({ "solver": settings })
}

/// Ramp CSVs: one shortcut ramp per `(g_f, T_f)` and a single reference ramp
/// at the longest duration.
pub fn cmd_ramp(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let dim = cfg.dimension()?;
    let g_i = cfg.gi[0];
    let mut run = Run::begin(Command::Ramp, cfg, json!({}))?;
    let t_max = cfg.tf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for &g_f in &cfg.gf {
        for protocol in cfg.protocol.protocols() {
            let durations: Vec<f64> = match protocol {
                Protocol::Sta => cfg.tf.clone(),
                Protocol::Tra => vec![t_max],
            };
            for t_f in durations {
                let start = Instant::now();
                let samples = ScalingProtocol::new(g_i, g_f, t_f, dim, protocol)?.samples(RAMP_SAMPLES)?;
                let name = format!(
                    "ramp_d{}_gf{}_{}_tf{}.csv",
                    dim.get(),
                    tag(g_f),
                    proto_tag(protocol),
                    tag(t_f)
                );
                let path = run.path(&name);
                let file = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
                write_ramp_csv(std::io::BufWriter::new(file), &samples).map_err(|e| io_err(&path, e))?;
                run.record(path);
                run.timing(name, start.elapsed().as_secs_f64());
            }
        }
    }
    run.finish()
}

/// Compression strokes at `N_i` and expansion strokes at `N_f` for every
/// `(T_f, protocol)`.
pub fn cmd_stroke(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let dim = cfg.dimension()?;
    let (g_i, g_f) = (cfg.gi[0], cfg.gf[0]);
    let mu_max = chemical_potential(cfg.ni.max(cfg.nf), g_i.max(g_f), dim)?;
    let settings = cfg.solver_settings(mu_max)?;
    let mut run = Run::begin(Command::Stroke, cfg, solver_json(&settings))?;

    let corners = [(cfg.ni, g_i), (cfg.ni, g_f), (cfg.nf, g_f), (cfg.nf, g_i)];
    let states = parallel_map(cfg.jobs, &corners, |&(n, g)| GroundState::compute(&settings, n, g))?
        .into_iter()
        .collect::<crate::Result<Vec<_>>>()?;

    let mut jobs = Vec::new();
    for &t_f in &cfg.tf {
        for protocol in cfg.protocol.protocols() {
            for direction in [Direction::Compression, Direction::Expansion] {
                jobs.push((t_f, protocol, direction));
            }
        }
    }
    let results = parallel_map(cfg.jobs, &jobs, |&(t_f, protocol, direction)| {
        let (from, to) = match direction {
            Direction::Compression => (&states[0], &states[1]),
            Direction::Expansion => (&states[2], &states[3]),
        };
        run_stroke_between(from, to, t_f, protocol, &settings)
    })?;

    let mut rows = Vec::with_capacity(results.len());
    for (&(t_f, protocol, direction), result) in jobs.iter().zip(results) {
        let r = result?;
        rows.push(vec![
            fmt_f64(t_f),
            protocol.to_string(),
            direction.to_string(),
            fmt_f64(r.w_irr),
            fmt_f64(r.fidelity),
            r.collapsed.to_string(),
        ]);
        run.timing(format!("T_f={t_f},{protocol},{direction}"), r.wall_time);
    }
    run.csv(&format!("strokes_d{}.csv", dim.get()), STROKE_HEADER, &rows)?;
    run.finish()
}

/// Otto-cycle sweep plus the power-ratio table with the adiabatic efficiency.
pub fn cmd_cycle(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let geometry = cfg.geometry()?;
    let spec = CycleSpec {
        g_i: cfg.gi[0],
        g_f: cfg.gf[0],
        n_i: cfg.ni,
        n_f: cfg.nf,
    };
    spec.validate()?;
    let settings = cfg.solver_settings(spec.mu_max(geometry)?)?;
    let mut run = Run::begin(Command::Cycle, cfg, json!({ "solver": settings, "cycle": spec }))?;
    let sweep = sweep_cycles(&spec, &cfg.tf, &cfg.protocol.protocols(), &settings, cfg.jobs)?;

    let mut rows = Vec::with_capacity(sweep.rows.len());
    for row in &sweep.rows {
        let tau = fmt_f64(2.0 * row.t_f);
        match &row.outcome {
            Ok(c) => {
                let e = &c.energetics;
                rows.push(vec![
                    tau,
                    row.protocol.to_string(),
                    fmt_f64(e.w_c),
                    fmt_f64(e.w_e),
                    fmt_f64(e.q_plus),
                    fmt_f64(e.q_minus),
                    fmt_f64(e.eta),
                    fmt_f64(e.power),
                    c.collapsed().to_string(),
                ]);
                run.timing(format!("T_f={},{}", row.t_f, row.protocol), row.wall_time);
            }
            Err(msg) => {
                eprintln!("warning: cycle T_f={} {} failed: {msg}", row.t_f, row.protocol);
                let nan = fmt_f64(f64::NAN);
                let mut r = vec![tau, row.protocol.to_string()];
                r.extend(std::iter::repeat_n(nan, 6));
                r.push("false".into());
                rows.push(r);
                run.timing(format!("T_f={},{},error: {msg}", row.t_f, row.protocol), row.wall_time);
            }
        }
    }
    let d = geometry.dimension().get();
    run.csv(&format!("cycle_d{d}.csv"), CYCLE_HEADER, &rows)?;

    let ratios: Vec<Vec<String>> = sweep
        .power_ratios()
        .iter()
        .map(|p| {
            vec![
                fmt_f64(p.tau),
                fmt_f64(p.p_sta),
                fmt_f64(p.p_tra),
                fmt_f64(p.ratio),
                fmt_f64(sweep.eta_ad),
            ]
        })
        .collect();
    run.csv(&format!("cycle_power_ratio_d{d}.csv"), POWER_HEADER, &ratios)?;
    run.finish()
}

/// Criterion curve `T_f^min(g_f)` per `g_i`, optionally checked against the
/// GPE collapse threshold.
pub fn cmd_stability(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let dim = cfg.dimension()?;
    let mut run = Run::begin(Command::Stability, cfg, json!({}))?;
    for &g_i in &cfg.gi {
        let start = Instant::now();
        let criterion: Vec<f64> = cfg
            .gf
            .iter()
            .map(|&g_f| {
                let q = StabilityQuery::new(g_i, g_f, cfg.n, dim).with_delta_crit(cfg.delta_crit);
                min_stroke_time(&q).unwrap_or_else(|e| {
                    eprintln!("warning: g_i={g_i} g_f={g_f}: {e}");
                    f64::NAN
                })
            })
            .collect();
        run.timing(format!("g_i={g_i},criterion"), start.elapsed().as_secs_f64());

        let observed: Vec<f64> = if cfg.verify_gpe {
            let g_max = cfg.gf.iter().copied().fold(g_i, f64::max);
            let settings = cfg.solver_settings(chemical_potential(cfg.n, g_max, dim)?)?;
            let items: Vec<(f64, f64)> = cfg.gf.iter().copied().zip(criterion.iter().copied()).collect();
            let found = parallel_map(cfg.jobs, &items, |&(g_f, t_crit)| {
                let started = Instant::now();
                let guess = if t_crit.is_finite() {
                    t_crit.max(VERIFY_STEP)
                } else {
                    VERIFY_STEP
                };
                let r = observed_min_stroke_time(cfg.n, g_i, g_f, &settings, guess, VERIFY_STEP);
                (r, started.elapsed().as_secs_f64())
            })?;
            let mut values = Vec::with_capacity(found.len());
            for (&(g_f, _), (r, wall)) in items.iter().zip(found) {
                values.push(r?.t_f_min);
                run.timing(format!("g_i={g_i},g_f={g_f},gpe"), wall);
            }
            values
        } else {
            vec![f64::NAN; cfg.gf.len()]
        };

        let rows: Vec<Vec<String>> = cfg
            .gf
            .iter()
            .zip(criterion.iter().zip(&observed))
            .map(|(&g_f, (&c, &o))| vec![fmt_f64(g_f), fmt_f64(c), fmt_f64(o)])
            .collect();
        let name = format!("stability_d{}_gi{}_n{}.csv", dim.get(), tag(g_i), tag(cfg.n));
        run.csv(&name, STABILITY_HEADER, &rows)?;
    }
    run.finish()
}

#[derive(Debug, Serialize)]
struct GroundStateDiagnostics {
    n: f64,
    g: f64,
    energy: f64,
    kinetic: f64,
    potential: f64,
    interaction: f64,
    chemical_potential: f64,
    virial_residual: f64,
    norm: f64,
    tf_energy: Option<f64>,
    tf_chemical_potential: Option<f64>,
    tf_relative_deviation: Option<f64>,
}

/// Ground state snapshot and diagnostics for each `g` in `--gi` at `--n`.
pub fn cmd_ground_state(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let dim = cfg.dimension()?;
    let mu_guess = |g: f64| {
        if g > 0.0 {
            chemical_potential(cfg.n, g, dim)
        } else {
            Ok(dim.as_f64() / 2.0)
        }
    };
    let g_max = cfg.gi.iter().copied().fold(0.0, f64::max);
    let settings = cfg.solver_settings(mu_guess(g_max)?)?;
    let mut run = Run::begin(Command::GroundState, cfg, solver_json(&settings))?;
    for &g in &cfg.gi {
        let start = Instant::now();
        let gs = GroundState::compute(&settings, cfg.n, g)?;
        let parts = energy_parts(&gs.psi, g);
        let (tf_e, tf_mu) = if g > 0.0 {
            (
                Some(tf_energy(cfg.n, g, dim)?),
                Some(chemical_potential(cfg.n, g, dim)?),
            )
        } else {
            (None, None)
        };
        let diag = GroundStateDiagnostics {
            n: cfg.n,
            g,
            energy: parts.total(),
            kinetic: parts.kinetic,
            potential: parts.potential,
            interaction: parts.interaction,
            chemical_potential: (parts.kinetic + parts.potential + 2.0 * parts.interaction) / cfg.n,
            virial_residual: parts.virial_residual(dim.as_f64()),
            norm: gs.psi.norm(),
            tf_energy: tf_e,
            tf_chemical_potential: tf_mu,
            tf_relative_deviation: tf_e.map(|e| (parts.total() - e) / e),
        };
        let stem = format!("ground_state_d{}_g{}_n{}", dim.get(), tag(g), tag(cfg.n));
        let csv = run.path(&format!("{stem}.csv"));
        write_snapshot(&csv, &gs.psi, g, 0.0).map_err(|e| io_err(&csv, e))?;
        let sidecar = crate::gpe::sidecar_path(&csv);
        run.record(csv);
        run.record(sidecar);
        let diag_path = run.path(&format!("{stem}_diagnostics.json"));
        let text = serde_json::to_string_pretty(&diag).map_err(|e| io_err(&diag_path, e))?;
        fs::write(&diag_path, text + "\n").map_err(|e| io_err(&diag_path, e))?;
        run.record(diag_path);
        run.timing(format!("g={g}"), start.elapsed().as_secs_f64());
    }
    run.finish()
}
