//! `feshbach` command-line front end.
//!
//! Every subcommand resolves a [`RunConfig`] (defaults, then an optional JSON
//! file given by `--config`, then flags), writes plot-ready CSV files into
//! `--out`, and finishes with a `<command>_manifest.json` describing the run.

mod commands;
mod config;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_cycle, cmd_ground_state, cmd_ramp, cmd_stability, cmd_stroke};
pub use config::{Command, Overrides, ProtocolSet, RunConfig, SweepRange};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Domain(_) | Error::GridMismatch => CliError::Usage(e.to_string()),
            Error::Io(_) | Error::Json(_) => CliError::Io(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "feshbach",
    version,
    about = "Feshbach-engine strokes, cycles and stability maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Export the scaling-function ramps g(t) for each T_f.
    Ramp(CommonArgs),
    /// Sweep single work strokes (compression and expansion).
    Stroke(CommonArgs),
    /// Sweep full Otto cycles and compare protocol powers.
    Cycle(CommonArgs),
    /// Minimum stroke time from the instability criterion.
    Stability(CommonArgs),
    /// Compute and dump a ground state with diagnostics.
    GroundState(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Spatial dimension (1 or 3).
    #[arg(long)]
    pub dim: Option<u32>,
    /// Initial interaction strength(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub gi: Option<Vec<f64>>,
    /// Final interaction strength(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub gf: Option<Vec<f64>>,
    /// Particle number for single-N commands.
    #[arg(long)]
    pub n: Option<f64>,
    /// Particle number on the compression stroke.
    #[arg(long)]
    pub ni: Option<f64>,
    /// Particle number on the expansion stroke.
    #[arg(long)]
    pub nf: Option<f64>,
    /// Stroke duration(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub tf: Option<Vec<f64>>,
    /// Evenly spaced durations `lo:hi:steps`; overrides --tf.
    #[arg(long = "tf-range")]
    pub tf_range: Option<String>,
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolSet>,
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,
    /// Box half-width L.
    #[arg(long = "box")]
    pub box_half_width: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Worker threads for sweeps.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also locate the collapse threshold with the GPE solver.
    #[arg(long = "verify-gpe")]
    pub verify_gpe: bool,
    /// Relative amplitude of seeded initial noise.
    #[arg(long = "noise-amp")]
    pub noise_amp: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl CommonArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            dim: self.dim,
            gi: self.gi.clone(),
            gf: self.gf.clone(),
            n: self.n,
            ni: self.ni,
            nf: self.nf,
            tf: self.tf.clone(),
            tf_range: self.tf_range.clone(),
            protocol: self.protocol,
            grid_points: self.grid_points,
            box_half_width: self.box_half_width,
            dt: self.dt,
            jobs: self.jobs,
            out: self.out.clone(),
            verify_gpe: self.verify_gpe.then_some(true),
            noise_amp: self.noise_amp,
            seed: self.seed,
            delta_crit: None,
        }
    }

    pub fn resolve(&self, command: Command) -> Result<RunConfig, CliError> {
        let file = self.config.as_deref().map(Overrides::from_file).transpose()?;
        RunConfig::resolve(command, file.as_ref(), &self.overrides())
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code; diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("feshbach: {e}");
            e.exit_code()
        }
    }
}

/// Runs one parsed subcommand and returns the files it wrote.
pub fn dispatch(sub: &Sub) -> Result<Vec<PathBuf>, CliError> {
    let (command, args) = match sub {
        Sub::Ramp(a) => (Command::Ramp, a),
        Sub::Stroke(a) => (Command::Stroke, a),
        Sub::Cycle(a) => (Command::Cycle, a),
        Sub::Stability(a) => (Command::Stability, a),
        Sub::GroundState(a) => (Command::GroundState, a),
    };
    let cfg = args.resolve(command)?;
    match command {
        Command::Ramp => cmd_ramp(&cfg),
        Command::Stroke => cmd_stroke(&cfg),
        Command::Cycle => cmd_cycle(&cfg),
        Command::Stability => cmd_stability(&cfg),
        Command::GroundState => cmd_ground_state(&cfg),
    }
}
