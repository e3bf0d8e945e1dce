use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ramp::Dimension;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Geometry {
    /// Periodic box `[-L, L)` with `M` nodes.
    Cartesian1D,
    /// Isotropic 3D trap reduced to `u(r) = r psi(r)` on `(0, L)`, with
    /// `u(0) = u(L) = 0` and `M - 1` interior nodes at `r_j = j L / M`.
    Radial3D,
}

impl Geometry {
    pub fn dimension(self) -> Dimension {
        match self {
            Geometry::Cartesian1D => Dimension::One,
            Geometry::Radial3D => Dimension::Three,
        }
    }

    pub fn for_dimension(d: Dimension) -> Result<Self> {
        match d {
            Dimension::One => Ok(Geometry::Cartesian1D),
            Dimension::Three => Ok(Geometry::Radial3D),
            Dimension::Two => Err(Error::invalid("no 2D propagation backend; use d = 1 or d = 3")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    geometry: Geometry,
    extent: f64,
    points: usize,
}

impl SpatialGrid {
    pub fn new(geometry: Geometry, extent: f64, points: usize) -> Result<Self> {
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::invalid(format!("box half-width must be positive, got {extent}")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::invalid(format!(
                "grid points must be a power of two >= 8, got {points}"
            )));
        }
        Ok(Self {
            geometry,
            extent,
            points,
        })
    }

    /// 1D: `M = 4096`, `L = 40`; radial: `M = 2048`, `L = 15`. Sized for
    /// `N = 1e4` and `g ~ 1`.
    pub fn default_for(geometry: Geometry) -> Self {
        match geometry {
            Geometry::Cartesian1D => Self {
                geometry,
                extent: 40.0,
                points: 4096,
            },
            Geometry::Radial3D => Self {
                geometry,
                extent: 15.0,
                points: 2048,
            },
        }
    }

    /// The default grid, enlarged until it satisfies [`Self::check_resolution`]
    /// for chemical potentials up to `mu_max`.
    pub fn for_chemical_potential(geometry: Geometry, mu_max: f64) -> Self {
        let base = Self::default_for(geometry);
        let radius = (2.0 * mu_max.max(0.0)).sqrt();
        let extent = base.extent.max((1.6 * radius).ceil());
        let mut grid = Self { extent, ..base };
        while grid.check_resolution(mu_max).is_err() && grid.points < (1 << 20) {
            grid.points *= 2;
        }
        grid
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dimension(&self) -> Dimension {
        self.geometry.dimension()
    }

    pub fn spacing(&self) -> f64 {
        match self.geometry {
            Geometry::Cartesian1D => 2.0 * self.extent / self.points as f64,
            Geometry::Radial3D => self.extent / self.points as f64,
        }
    }

    /// Number of stored nodes.
    pub fn len(&self) -> usize {
        match self.geometry {
            Geometry::Cartesian1D => self.points,
            Geometry::Radial3D => self.points - 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coords(&self) -> Vec<f64> {
        let dx = self.spacing();
        match self.geometry {
            Geometry::Cartesian1D => (0..self.points).map(|j| -self.extent + dx * j as f64).collect(),
            Geometry::Radial3D => (1..self.points).map(|j| dx * j as f64).collect(),
        }
    }

    /// Quadrature weight multiplying `|stored value|^2` at every node:
    /// `dx` in 1D, `4 pi dr` for the radial reduction.
    pub fn measure(&self) -> f64 {
        match self.geometry {
            Geometry::Cartesian1D => self.spacing(),
            Geometry::Radial3D => 4.0 * std::f64::consts::PI * self.spacing(),
        }
    }

    /// Harmonic trap `|x|^2 / 2` on the nodes.
    pub fn potential(&self) -> Vec<f64> {
        self.coords().into_iter().map(|x| 0.5 * x * x).collect()
    }

    /// Largest time step accepted by real-time propagation, `min(dx^2 / pi, 1e-3)`.
    pub fn max_time_step(&self) -> f64 {
        (self.spacing().powi(2) / std::f64::consts::PI).min(1e-3)
    }

    /// Default real-time step: `min(1e-4, 0.9 dx^2 / pi)`.
    pub fn default_time_step(&self) -> f64 {
        (0.9 * self.spacing().powi(2) / std::f64::consts::PI).min(1e-4)
    }

    /// Box at least 1.5 Thomas-Fermi radii and spacing at most half a
    /// healing length, both at `mu_max`.
    pub fn check_resolution(&self, mu_max: f64) -> Result<()> {
        if mu_max <= 0.0 {
            return Ok(());
        }
        let radius = (2.0 * mu_max).sqrt();
        if self.extent <= 1.5 * radius {
            return Err(Error::invalid(format!(
                "box half-width {} must exceed 1.5 x TF radius {radius:.4}",
                self.extent
            )));
        }
        let half_zeta = 0.5 * healing_length(mu_max);
        if self.spacing() > half_zeta {
            return Err(Error::invalid(format!(
                "spacing {:.5} exceeds half the healing length, {half_zeta:.5}",
                self.spacing()
            )));
        }
        Ok(())
    }
}

/// `1 / sqrt(2 mu)`.
pub fn healing_length(mu: f64) -> f64 {
    1.0 / (2.0 * mu).sqrt()
}
