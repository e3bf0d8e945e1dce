use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::engine::SolverSettings;
use crate::gpe::{Geometry, Noise, SpatialGrid};
use crate::ramp::{Dimension, Protocol};
use crate::stability::DEFAULT_DELTA_CRIT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolSet {
    Sta,
    Tra,
    Both,
}

impl ProtocolSet {
    pub fn protocols(self) -> Vec<Protocol> {
        match self {
            ProtocolSet::Sta => vec![Protocol::Sta],
            ProtocolSet::Tra => vec![Protocol::Tra],
            ProtocolSet::Both => vec![Protocol::Sta, Protocol::Tra],
        }
    }
}

/// `lo:hi:steps`, `steps` points spaced evenly from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl SweepRange {
    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.lo],
            n => (0..n)
                .map(|j| {
                    if j + 1 == n {
                        self.hi
                    } else {
                        self.lo + (self.hi - self.lo) * j as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

impl FromStr for SweepRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected lo:hi:steps, got '{s}'"));
        }
        let lo: f64 = parts[0].trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
        let hi: f64 = parts[1].trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
        let steps: usize = parts[2].trim().parse().map_err(|e| format!("bad step count: {e}"))?;
        if steps == 0 || !(hi >= lo) || (steps > 1 && hi == lo) {
            return Err(format!("empty sweep range '{s}'"));
        }
        Ok(Self { lo, hi, steps })
    }
}

/// One layer of configuration: a JSON config file or the command line.
/// Unset fields fall through to the layer below.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct Overrides {
    pub dim: Option<u32>,
    pub gi: Option<Vec<f64>>,
    pub gf: Option<Vec<f64>>,
    pub n: Option<f64>,
    pub ni: Option<f64>,
    pub nf: Option<f64>,
    pub tf: Option<Vec<f64>>,
    pub tf_range: Option<String>,
    pub protocol: Option<ProtocolSet>,
    pub grid_points: Option<usize>,
    #[serde(rename = "box")]
    pub box_half_width: Option<f64>,
    pub dt: Option<f64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub verify_gpe: Option<bool>,
    pub noise_amp: Option<f64>,
    pub seed: Option<u64>,
    pub delta_crit: Option<f64>,
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Ramp,
    Stroke,
    Cycle,
    Stability,
    GroundState,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ramp => "ramp",
            Command::Stroke => "stroke",
            Command::Cycle => "cycle",
            Command::Stability => "stability",
            Command::GroundState => "ground-state",
        }
    }
}

/// Fully resolved parameters of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub dim: u32,
    pub gi: Vec<f64>,
    pub gf: Vec<f64>,
    pub n: f64,
    pub ni: f64,
    pub nf: f64,
    pub tf: Vec<f64>,
    pub protocol: ProtocolSet,
    pub grid_points: Option<usize>,
    #[serde(rename = "box")]
    pub box_half_width: Option<f64>,
    pub dt: Option<f64>,
    pub jobs: usize,
    pub out: PathBuf,
    pub verify_gpe: bool,
    pub noise_amp: Option<f64>,
    pub seed: u64,
    pub delta_crit: f64,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        let jobs = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        let base = Self {
            dim: 3,
            gi: vec![1.0],
            gf: vec![0.8],
            n: 1e4,
            ni: 1e4,
            nf: 8e3,
            tf: vec![1.0],
            protocol: ProtocolSet::Both,
            grid_points: None,
            box_half_width: None,
            dt: None,
            jobs,
            out: PathBuf::from("out"),
            verify_gpe: false,
            noise_amp: None,
            seed: 0,
            delta_crit: DEFAULT_DELTA_CRIT,
        };
        match command {
            Command::Ramp => Self {
                tf: vec![0.05, 0.1, 0.2],
                ..base
            },
            Command::Stroke => Self {
                tf: SweepRange {
                    lo: 0.05,
                    hi: 2.0,
                    steps: 40,
                }
                .values(),
                ..base
            },
            Command::Cycle => Self {
                tf: vec![0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0],
                ..base
            },
            Command::Stability => Self {
                dim: 1,
                gi: vec![1.0, 2.0],
                gf: (0..10).map(|j| 0.5 + 0.05 * j as f64).collect(),
                protocol: ProtocolSet::Sta,
                ..base
            },
            Command::GroundState => Self {
                dim: 1,
                tf: Vec::new(),
                ..base
            },
        }
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = &o.$field { self.$field = v.clone(); } )* };
        }
        set!(dim, gi, gf, n, ni, nf, tf, protocol, jobs, out, verify_gpe, seed, delta_crit);
        if let Some(range) = &o.tf_range {
            self.tf = range.parse::<SweepRange>().map_err(CliError::Usage)?.values();
        }
        if o.grid_points.is_some() {
            self.grid_points = o.grid_points;
        }
        if o.box_half_width.is_some() {
            self.box_half_width = o.box_half_width;
        }
        if o.dt.is_some() {
            self.dt = o.dt;
        }
        if o.noise_amp.is_some() {
            self.noise_amp = o.noise_amp;
        }
        Ok(())
    }

    pub fn resolve(command: Command, file: Option<&Overrides>, flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = Self::defaults(command);
        if let Some(file) = file {
            cfg.apply(file)?;
        }
        cfg.apply(flags)?;
        cfg.validate(command)?;
        Ok(cfg)
    }

    pub fn validate(&self, command: Command) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        let dim = self.dimension()?;
        if matches!(command, Command::Stroke | Command::Cycle | Command::GroundState) && dim == Dimension::Two {
            return usage("--dim must be 1 or 3".into());
        }
        if command == Command::Stability && self.verify_gpe && dim == Dimension::Two {
            return usage("--verify-gpe needs --dim 1 or 3".into());
        }
        for (name, values) in [("--gi", &self.gi), ("--gf", &self.gf), ("--tf", &self.tf)] {
            // a non-interacting ground state is a valid request
            let ok = |v: f64| v.is_finite() && (v > 0.0 || (command == Command::GroundState && v == 0.0));
            if values.iter().any(|&v| !ok(v)) {
                return usage(format!("{name} values must be positive"));
            }
        }
        if self.gi.is_empty() || (command != Command::GroundState && self.gf.is_empty()) {
            return usage("interaction list is empty".into());
        }
        if command != Command::GroundState && self.tf.is_empty() && command != Command::Stability {
            return usage("empty T_f sweep".into());
        }
        for (name, v) in [("--n", self.n), ("--ni", self.ni), ("--nf", self.nf)] {
            if !(v > 0.0 && v.is_finite()) {
                return usage(format!("{name} must be positive"));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return usage("--dt must be positive".into());
            }
        }
        if let Some(b) = self.box_half_width {
            if !(b > 0.0) {
                return usage("--box must be positive".into());
            }
        }
        if let Some(a) = self.noise_amp {
            if !(a >= 0.0) {
                return usage("--noise-amp must be non-negative".into());
            }
        }
        if self.jobs == 0 {
            return usage("--jobs must be at least 1".into());
        }
        if !(self.delta_crit > 1.0) {
            return usage("delta-crit must exceed 1".into());
        }
        if matches!(command, Command::Stroke | Command::Cycle) && (self.gi.len() != 1 || self.gf.len() != 1) {
            return usage(format!("{} takes a single --gi and --gf", command.name()));
        }
        if command == Command::Ramp && self.gi.len() != 1 {
            return usage("ramp takes a single --gi".into());
        }
        Ok(())
    }

    pub fn dimension(&self) -> Result<Dimension, CliError> {
        Dimension::try_from(self.dim).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn geometry(&self) -> Result<Geometry, CliError> {
        Geometry::for_dimension(self.dimension()?).map_err(|e| CliError::Usage(e.to_string()))
    }

    /// Solver settings: explicit grid overrides win; otherwise the default
    /// grid is enlarged as needed for `mu_max`.
    pub fn solver_settings(&self, mu_max: f64) -> Result<SolverSettings, CliError> {
        let geometry = self.geometry()?;
        let grid = if self.grid_points.is_some() || self.box_half_width.is_some() {
            let base = SpatialGrid::default_for(geometry);
            let grid = SpatialGrid::new(
                geometry,
                self.box_half_width.unwrap_or(base.extent()),
                self.grid_points.unwrap_or(base.points()),
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
            if let Err(e) = grid.check_resolution(mu_max) {
                eprintln!("warning: {e}");
            }
            grid
        } else {
            SpatialGrid::for_chemical_potential(geometry, mu_max)
        };
        let mut settings = SolverSettings::new(grid);
        if let Some(dt) = self.dt {
            settings.propagation.dt = dt;
        }
        if let Some(amplitude) = self.noise_amp {
            settings.propagation.noise = Some(Noise {
                amplitude,
                seed: self.seed,
            });
        }
        Ok(settings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_range_parsing() {
        let r: SweepRange = "0.1:0.5:5".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[4], 0.5);
        assert!("0.5:0.1:3".parse::<SweepRange>().is_err());
        assert!("0.1:0.5:0".parse::<SweepRange>().is_err());
        assert!("0.1:0.5".parse::<SweepRange>().is_err());
        assert_eq!("2:2:1".parse::<SweepRange>().unwrap().values(), vec![2.0]);
    }

    #[test]
    fn precedence_defaults_file_flags() {
        let file = Overrides {
            gi: Some(vec![2.0]),
            gf: Some(vec![1.5]),
            dt: Some(5e-5),
            ..Default::default()
        };
        let flags = Overrides {
            gf: Some(vec![1.2]),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Command::Cycle, Some(&file), &flags).unwrap();
        assert_eq!(cfg.gi, vec![2.0]);
        assert_eq!(cfg.gf, vec![1.2]);
        assert_eq!(cfg.dt, Some(5e-5));
        assert_eq!(cfg.ni, 1e4);
    }

    #[test]
    fn config_file_keys_match_flags() {
        let o: Overrides = serde_json::from_str(r#"{"tf-range": "0.1:1:10", "box": 30, "verify-gpe": true}"#).unwrap();
        assert_eq!(o.box_half_width, Some(30.0));
        assert_eq!(o.verify_gpe, Some(true));
        assert!(serde_json::from_str::<Overrides>(r#"{"nonsense": 1}"#).is_err());
    }

    #[test]
    fn validation_errors_are_usage_errors() {
        let bad = Overrides {
            dim: Some(2),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(Command::Stroke, None, &bad),
            Err(CliError::Usage(_))
        ));
        let bad = Overrides {
            tf_range: Some("1:0:3".into()),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(Command::Stroke, None, &bad),
            Err(CliError::Usage(_))
        ));
        let bad = Overrides {
            gi: Some(vec![-1.0]),
            ..Default::default()
        };
        assert!(RunConfig::resolve(Command::Ramp, None, &bad).is_err());
    }
}
