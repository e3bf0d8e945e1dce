//! Simulation toolkit for a Bose-Einstein-condensate Feshbach engine in the
//! Thomas-Fermi regime.
//!
//! * [`ramp`]: scaling function `a(t)` and the shortcut / reference
//!   interaction ramps built from it.
//! * [`thomas_fermi`]: closed-form chemical potentials, energies, density
//!   profiles, the analytic scaling solution and the adiabatic efficiency.
//! * [`gpe`]: split-step Gross-Pitaevskii solver (1D and 3D radial).
//! * [`engine`]: work strokes, Otto cycles and duration sweeps.
//! * [`stability`]: modulational-instability criterion and minimum stroke time.
//! * [`cli`]: the `feshbach` command-line front end.
//!
//! Units are dimensionless throughout: lengths in `sqrt(hbar / m omega)`,
//! energies in `hbar omega`, times in `1 / omega`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod engine;
pub mod error;
pub mod gpe;
pub mod numerics;
pub mod output;
pub mod ramp;
pub mod stability;
pub mod thomas_fermi;

pub use error::{Error, Result};
pub use ramp::{Dimension, InteractionRamp, Protocol, RampSample, ScaleFactor, ScalingProtocol};
