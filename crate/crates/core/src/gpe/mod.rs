//! Numerical Gross-Pitaevskii propagation in 1D and in the radial reduction
//! of an isotropic 3D trap.

mod grid;
mod snapshot;
mod solver;
mod spectral;
mod wavefunction;

pub use grid::{healing_length, Geometry, SpatialGrid};
pub use snapshot::{
    read_snapshot, sidecar_path, write_snapshot, write_trajectory_csv, SnapshotMeta, SNAPSHOT_CSV_HEADER,
    TRAJECTORY_CSV_HEADER,
};
pub use solver::{
    energy, energy_parts, fidelity, ground_state, irreversible_work, propagate, relax, EnergyParts, GroundStateOptions,
    IrreversibleWork, Noise, Propagation, PropagationOptions, TrajectoryPoint,
};
pub use wavefunction::WaveFunction;
