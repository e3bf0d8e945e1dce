//! Wavefunction snapshots (`x,re,im` CSV plus a JSON sidecar) and
//! trajectory CSV files.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{Geometry, SpatialGrid};
use super::solver::TrajectoryPoint;
use super::wavefunction::WaveFunction;
use crate::error::{Error, Result};
use crate::output::{fmt_f64, write_csv};

pub const SNAPSHOT_CSV_HEADER: &str = "x,re,im";
pub const TRAJECTORY_CSV_HEADER: &str = "t,E,norm,central_density";

/// JSON sidecar of a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub geometry: Geometry,
    #[serde(rename = "L")]
    pub extent: f64,
    #[serde(rename = "M")]
    pub points: usize,
    #[serde(rename = "N")]
    pub n: f64,
    pub g: f64,
    pub t: f64,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes the stored values (`u = r psi` on radial grids) and the sidecar.
pub fn write_snapshot(csv: &Path, psi: &WaveFunction, g: f64, t: f64) -> Result<()> {
    let grid = psi.grid();
    let rows: Vec<Vec<String>> = grid
        .coords()
        .into_iter()
        .zip(psi.values())
        .map(|(x, v)| vec![fmt_f64(x), fmt_f64(v.re), fmt_f64(v.im)])
        .collect();
    write_csv(csv, SNAPSHOT_CSV_HEADER, &rows)?;
    let meta = SnapshotMeta {
        geometry: grid.geometry(),
        extent: grid.extent(),
        points: grid.points(),
        n: psi.norm(),
        g,
        t,
    };
    fs::write(sidecar_path(csv), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

pub fn read_snapshot(csv: &Path) -> Result<(WaveFunction, SnapshotMeta)> {
    let meta: SnapshotMeta = serde_json::from_str(&fs::read_to_string(sidecar_path(csv))?)?;
    let grid = SpatialGrid::new(meta.geometry, meta.extent, meta.points)?;
    let reader = BufReader::new(fs::File::open(csv)?);
    let mut values = Vec::with_capacity(grid.len());
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if lineno == 0 {
            if line.trim() != SNAPSHOT_CSV_HEADER {
                return Err(Error::invalid(format!("unexpected snapshot header '{line}'")));
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::invalid(format!("line {}: expected 3 columns", lineno + 1)));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::invalid(format!("line {}: {e}", lineno + 1)))
        };
        values.push(Complex64::new(parse(cols[1])?, parse(cols[2])?));
    }
    Ok((WaveFunction::new(grid, values)?, meta))
}

pub fn write_trajectory_csv(path: &Path, trajectory: &[TrajectoryPoint]) -> Result<()> {
    let rows: Vec<Vec<String>> = trajectory
        .iter()
        .map(|p| {
            vec![
                fmt_f64(p.t),
                fmt_f64(p.energy),
                fmt_f64(p.norm),
                fmt_f64(p.central_density),
            ]
        })
        .collect();
    write_csv(path, TRAJECTORY_CSV_HEADER, &rows)
}
