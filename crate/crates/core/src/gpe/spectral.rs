//! Diagonal operators in momentum space.
//!
//! Cartesian grids use a periodic FFT of length `M`. Radial grids apply the
//! sine transform by embedding `u` into an odd sequence of length `2M`
//! (`u_0 = u_M = 0`), which makes every `2M`-point FFT multiplier symmetric in
//! `k` act as a DST-I multiplier with wave numbers `n pi / L`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{Geometry, SpatialGrid};

pub(crate) struct Spectral {
    geometry: Geometry,
    stored: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    k2: Vec<f64>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Spectral {
    pub(crate) fn new(grid: &SpatialGrid) -> Self {
        let (size, length) = match grid.geometry() {
            Geometry::Cartesian1D => (grid.points(), 2.0 * grid.extent()),
            Geometry::Radial3D => (2 * grid.points(), 2.0 * grid.extent()),
        };
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let dk = 2.0 * std::f64::consts::PI / length;
        let k2 = (0..size)
            .map(|j| {
                let n = if j <= size / 2 {
                    j as f64
                } else {
                    j as f64 - size as f64
                };
                (n * dk).powi(2)
            })
            .collect();
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self {
            geometry: grid.geometry(),
            stored: grid.len(),
            fwd,
            inv,
            k2,
            buf: vec![Complex64::new(0.0, 0.0); size],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    fn size(&self) -> usize {
        self.k2.len()
    }

    /// Multiplier `exp(-z k^2 / 2)` including the inverse-FFT normalisation.
    /// `z = i h` gives a real-time kinetic step, `z = h` an imaginary-time one.
    pub(crate) fn kinetic_multiplier(&self, z: Complex64) -> Vec<Complex64> {
        let norm = 1.0 / self.size() as f64;
        self.k2.iter().map(|&k2| (-z * 0.5 * k2).exp() * norm).collect()
    }

    fn load(&mut self, psi: &[Complex64]) {
        match self.geometry {
            Geometry::Cartesian1D => self.buf.copy_from_slice(psi),
            Geometry::Radial3D => {
                let m = self.stored + 1;
                self.buf[0] = Complex64::new(0.0, 0.0);
                self.buf[m] = Complex64::new(0.0, 0.0);
                for (j, &u) in psi.iter().enumerate() {
                    self.buf[j + 1] = u;
                    self.buf[2 * m - 1 - j] = -u;
                }
            }
        }
    }

    fn store(&self, psi: &mut [Complex64]) {
        match self.geometry {
            Geometry::Cartesian1D => psi.copy_from_slice(&self.buf),
            Geometry::Radial3D => psi.copy_from_slice(&self.buf[1..=self.stored]),
        }
    }

    /// `psi <- F^-1 diag(mult) F psi`; `mult` must come from
    /// [`Self::kinetic_multiplier`] (or carry the same normalisation).
    pub(crate) fn apply(&mut self, psi: &mut [Complex64], mult: &[Complex64]) {
        self.load(psi);
        self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
        self.buf.iter_mut().zip(mult).for_each(|(b, m)| *b *= m);
        self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
        self.store(psi);
    }

    /// `sum_nodes |grad psi|^2 / 2` (without the grid measure).
    pub(crate) fn kinetic_sum(&mut self, psi: &[Complex64]) -> f64 {
        self.load(psi);
        self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
        let s: f64 = self
            .buf
            .iter()
            .zip(&self.k2)
            .map(|(b, k2)| 0.5 * k2 * b.norm_sqr())
            .sum();
        let size = self.size() as f64;
        match self.geometry {
            Geometry::Cartesian1D => s / size,
            // the odd extension holds every node twice
            Geometry::Radial3D => 0.5 * s / size,
        }
    }
}
