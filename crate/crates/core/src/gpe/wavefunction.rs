use num_complex::Complex64;

use super::grid::{Geometry, SpatialGrid};
use crate::error::{Error, Result};

/// Complex field on a [`SpatialGrid`]. For [`Geometry::Radial3D`] the stored
/// values are `u(r) = r psi(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: SpatialGrid,
    values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "grid has {} nodes but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `psi(|x|)` on the grid, converting to `u = r psi` for radial grids.
    pub fn from_fn<F: FnMut(f64) -> Complex64>(grid: SpatialGrid, mut psi: F) -> Self {
        let values = grid
            .coords()
            .into_iter()
            .map(|x| match grid.geometry() {
                Geometry::Cartesian1D => psi(x),
                Geometry::Radial3D => psi(x) * x,
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `int |psi|^2`, i.e. the particle number.
    pub fn norm(&self) -> f64 {
        self.grid.measure() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// `|psi|^2` at every node.
    pub fn density(&self) -> Vec<f64> {
        match self.grid.geometry() {
            Geometry::Cartesian1D => self.values.iter().map(|v| v.norm_sqr()).collect(),
            Geometry::Radial3D => self
                .values
                .iter()
                .zip(self.grid.coords())
                .map(|(v, r)| v.norm_sqr() / (r * r))
                .collect(),
        }
    }

    /// `|psi(0)|^2`. On radial grids `psi(0)` is extrapolated from the first
    /// two nodes using the evenness of `psi(r)`.
    pub fn central_density(&self) -> f64 {
        match self.grid.geometry() {
            Geometry::Cartesian1D => self.values[self.grid.points() / 2].norm_sqr(),
            Geometry::Radial3D => {
                let dr = self.grid.spacing();
                let p1 = self.values[0] / dr;
                let p2 = self.values[1] / (2.0 * dr);
                ((4.0 * p1 - p2) / 3.0).norm_sqr()
            }
        }
    }

    pub fn peak_density(&self) -> f64 {
        self.density().into_iter().fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `<self|other>` with the grid measure.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.measure())
    }

    /// Rescales so that `norm() == n`.
    pub fn normalize_to(&mut self, n: f64) {
        let current = self.norm();
        if current > 0.0 {
            let f = (n / current).sqrt();
            self.values.iter_mut().for_each(|v| *v *= f);
        }
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        self.values.iter_mut().for_each(|v| *v *= factor);
        self
    }
}
