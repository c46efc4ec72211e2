//! Position/time discretization and the lattice wavefunction.
//!
//! Sites sit at cell centers, `x_j = x_min + (j + 1/2) dx` for the 0-based
//! index `j`, so each amplitude represents the indicator box
//! `[x_j - dx/2, x_j + dx/2]` and `sum |psi_j|^2 dx` is the exact norm of
//! the box expansion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    x_min: f64,
    x_max: f64,
    n_sites: usize,
    dx: f64,
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, n_sites: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "need finite x_max > x_min, got [{x_min}, {x_max}]"
            )));
        }
        if n_sites == 0 {
            return Err(Error::InvalidGrid("n_sites must be positive".into()));
        }
        Ok(Self {
            x_min,
            x_max,
            n_sites,
            dx: (x_max - x_min) / n_sites as f64,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Position of site `j` (0-based), checked.
    pub fn site_position(&self, j: usize) -> Result<f64> {
        if j >= self.n_sites {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.n_sites,
            });
        }
        Ok(self.x(j))
    }

    #[inline]
    pub(crate) fn x(&self, j: usize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.dx
    }

    pub fn positions(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_sites).map(|j| self.x(j))
    }

    /// Site whose cell contains `x`, clamped to the grid.
    pub fn nearest_site(&self, x: f64) -> usize {
        let raw = ((x - self.x_min) / self.dx - 0.5).round();
        if raw <= 0.0 {
            0
        } else {
            (raw as usize).min(self.n_sites - 1)
        }
    }

    /// Inclusive range of sites with `a <= x_j <= b`; `None` when empty.
    pub fn sites_in(&self, a: f64, b: f64) -> Option<std::ops::RangeInclusive<usize>> {
        let mut it = (0..self.n_sites).filter(|&j| {
            let x = self.x(j);
            a <= x && x <= b
        });
        let first = it.next()?;
        let last = it.next_back().unwrap_or(first);
        Some(first..=last)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || !t0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive and finite, got {dt}"
            )));
        }
        Ok(Self { t0, dt, n_steps })
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: SpatialGrid,
    amplitudes: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: SpatialGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.n_sites() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_sites(),
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Self {
            grid,
            amplitudes: vec![Complex64::new(0.0, 0.0); grid.n_sites()],
        }
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.positions().map(f).collect();
        Self { grid, amplitudes }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `sqrt(sum |psi_j|^2 dx)`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// Probability carried by the sites with `a <= x_j <= b`.
    pub fn probability_in_interval(&self, a: f64, b: f64) -> f64 {
        match self.grid.sites_in(a, b) {
            Some(r) => {
                self.amplitudes[r].iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
            }
            None => 0.0,
        }
    }

    /// Relative L2 distance `||self - other|| / ||other||` on the same grid.
    pub fn relative_distance(&self, other: &WaveFunction) -> f64 {
        let diff: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let reference: f64 = other.amplitudes.iter().map(|z| z.norm_sqr()).sum();
        (diff / reference).sqrt()
    }
}
