//! Scenario ingredients: Gaussian packets, square potentials and source
//! amplitude schedules.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{SpatialGrid, WaveFunction};
use crate::propagator::{Ramp, SourceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    pub x0: f64,
    pub p0: f64,
    pub sigma0: f64,
}

/// Sampled packet plus whether it clears both grid edges by `6 sigma0`.
#[derive(Debug, Clone)]
pub struct PreparedPacket {
    pub psi: WaveFunction,
    pub clearance_ok: bool,
}

/// `psi(x, 0) = (sigma0^2 pi)^(-1/4) exp[i p0 (x - x0) - (x - x0)^2 / (2 sigma0^2)]`
/// sampled at the site positions.
pub fn gaussian_packet(grid: &SpatialGrid, spec: &PacketSpec) -> Result<PreparedPacket> {
    if !(spec.sigma0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma0 must be positive, got {}",
            spec.sigma0
        )));
    }
    let amp = (spec.sigma0 * spec.sigma0 * std::f64::consts::PI).powf(-0.25);
    let psi = WaveFunction::from_fn(*grid, |x| {
        let u = x - spec.x0;
        amp * Complex64::new(-u * u / (2.0 * spec.sigma0 * spec.sigma0), spec.p0 * u).exp()
    });
    let clearance = 6.0 * spec.sigma0;
    let clearance_ok = spec.x0 - clearance >= grid.x_min() && spec.x0 + clearance <= grid.x_max();
    if !clearance_ok {
        log::warn!(
            "packet at x0 = {} with sigma0 = {} is within 6 sigma0 of the grid edge",
            spec.x0,
            spec.sigma0
        );
    }
    Ok(PreparedPacket { psi, clearance_ok })
}

#[derive(Clone)]
pub enum PotentialKind {
    Free,
    SquareBarrier,
    SquareWell,
    /// Evaluated at each site position.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Free => write!(f, "Free"),
            Self::SquareBarrier => write!(f, "SquareBarrier"),
            Self::SquareWell => write!(f, "SquareWell"),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeightRule {
    /// `|V0| = p0^2 / 2`, the mean packet energy.
    MatchedToP0,
    Explicit(f64),
}

#[derive(Debug, Clone)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub height: HeightRule,
    pub half_width: f64,
}

impl PotentialSpec {
    pub fn free() -> Self {
        Self {
            kind: PotentialKind::Free,
            height: HeightRule::MatchedToP0,
            half_width: 1.0,
        }
    }

    pub fn barrier(height: HeightRule, half_width: f64) -> Self {
        Self {
            kind: PotentialKind::SquareBarrier,
            height,
            half_width,
        }
    }

    pub fn well(height: HeightRule, half_width: f64) -> Self {
        Self {
            kind: PotentialKind::SquareWell,
            height,
            half_width,
        }
    }
}

/// `V_j = ±V0` for `|x_j| < x_b`, zero elsewhere; `+` for barriers, `-` for wells.
pub fn sample_potential(grid: &SpatialGrid, spec: &PotentialSpec, p0: f64) -> Result<Vec<f64>> {
    let magnitude = match spec.height {
        HeightRule::MatchedToP0 => 0.5 * p0 * p0,
        HeightRule::Explicit(v0) => v0,
    };
    let sign = match &spec.kind {
        PotentialKind::Free => return Ok(vec![0.0; grid.n_sites()]),
        PotentialKind::Custom(f) => return Ok(grid.positions().map(|x| f(x)).collect()),
        PotentialKind::SquareBarrier => 1.0,
        PotentialKind::SquareWell => -1.0,
    };
    if !(spec.half_width > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "square potential half-width must be positive, got {}",
            spec.half_width
        )));
    }
    Ok(grid
        .positions()
        .map(|x| {
            if x.abs() < spec.half_width {
                sign * magnitude
            } else {
                0.0
            }
        })
        .collect())
}

/// `S(t) = S0 (1 - exp(-t / dT))`, or `S0` for a constant source.
pub fn source_amplitude(spec: &SourceSpec, t: f64) -> Complex64 {
    match spec.ramp {
        Ramp::Constant => spec.s0,
        Ramp::Exponential { time_constant } => spec.s0 * -(-t / time_constant).exp_m1(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_grid() -> SpatialGrid {
        SpatialGrid::new(-20.0, 20.0, 1000).unwrap()
    }

    #[test]
    fn packet_is_unit_norm() {
        // continuum profile integrates to exactly 1; box quadrature with
        // dx = 0.04 sigma0 is spectrally accurate for a Gaussian
        let p = gaussian_packet(
            &fig1_grid(),
            &PacketSpec {
                x0: -10.0,
                p0: 7.0,
                sigma0: 1.0,
            },
        )
        .unwrap();
        assert!(p.clearance_ok);
        assert!((p.psi.norm() - 1.0).abs() < 1e-6);
        let left = p.psi.probability_in_interval(-20.0, 0.0);
        assert!((left - 1.0).abs() < 1e-6);
    }

    #[test]
    fn packet_symmetry_and_peak() {
        let grid = fig1_grid();
        let p = gaussian_packet(
            &grid,
            &PacketSpec {
                x0: 0.0,
                p0: 0.0,
                sigma0: 1.5,
            },
        )
        .unwrap();
        let a = p.psi.amplitudes();
        for j in 0..500 {
            assert!((a[j] - a[999 - j]).norm() < 1e-15);
            assert_eq!(a[j].im, 0.0);
        }
        let spec = PacketSpec {
            x0: 3.3,
            p0: 4.0,
            sigma0: 0.7,
        };
        let p = gaussian_packet(&grid, &spec).unwrap();
        let peak = (0..1000)
            .max_by(|&i, &j| {
                p.psi.amplitudes()[i]
                    .norm()
                    .total_cmp(&p.psi.amplitudes()[j].norm())
            })
            .unwrap();
        assert_eq!(peak, grid.nearest_site(3.3));
    }

    #[test]
    fn clearance_flag() {
        let p = gaussian_packet(
            &fig1_grid(),
            &PacketSpec {
                x0: -16.0,
                p0: 1.0,
                sigma0: 1.0,
            },
        )
        .unwrap();
        assert!(!p.clearance_ok);
        assert!(gaussian_packet(
            &fig1_grid(),
            &PacketSpec {
                x0: 0.0,
                p0: 1.0,
                sigma0: 0.0
            }
        )
        .is_err());
    }

    #[test]
    fn square_potentials() {
        let grid = fig1_grid();
        let v = sample_potential(
            &grid,
            &PotentialSpec::barrier(HeightRule::MatchedToP0, 2.0),
            7.0,
        )
        .unwrap();
        for (x, vj) in grid.positions().zip(&v) {
            let want = if x.abs() < 2.0 { 24.5 } else { 0.0 };
            assert_eq!(*vj, want);
        }
        for j in 0..500 {
            assert_eq!(v[j], v[999 - j]);
        }
        let w = sample_potential(
            &grid,
            &PotentialSpec::well(HeightRule::MatchedToP0, 2.0),
            7.0,
        )
        .unwrap();
        assert!(v.iter().zip(&w).all(|(a, b)| *a == -*b));
        let e = sample_potential(
            &grid,
            &PotentialSpec::barrier(HeightRule::Explicit(3.0), 2.0),
            7.0,
        )
        .unwrap();
        assert_eq!(e.iter().cloned().fold(0.0, f64::max), 3.0);
        assert!(sample_potential(&grid, &PotentialSpec::free(), 7.0)
            .unwrap()
            .iter()
            .all(|&x| x == 0.0));
        let custom = PotentialSpec {
            kind: PotentialKind::Custom(Arc::new(|x| x * x)),
            height: HeightRule::MatchedToP0,
            half_width: 1.0,
        };
        let c = sample_potential(&grid, &custom, 0.0).unwrap();
        assert!((c[0] - 19.98 * 19.98).abs() < 1e-9);
    }

    #[test]
    fn ramp_schedule() {
        let ramped = SourceSpec {
            s0: Complex64::new(5.0, 0.0),
            ramp: Ramp::Exponential { time_constant: 2.0 },
            omega: 1.0,
            site: 0,
        };
        assert_eq!(source_amplitude(&ramped, 0.0), Complex64::new(0.0, 0.0));
        let at_dt = source_amplitude(&ramped, 2.0);
        assert!((at_dt.re - 5.0 * (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        assert!((at_dt.re / 5.0 - 0.6321).abs() < 1e-4);
        let mut last = 0.0;
        for k in 0..200 {
            let m = source_amplitude(&ramped, k as f64 * 0.1).norm();
            assert!(m >= last);
            last = m;
        }
        assert!((source_amplitude(&ramped, 100.0).re - 5.0).abs() < 1e-12);
        let constant = SourceSpec {
            ramp: Ramp::Constant,
            ..ramped
        };
        assert_eq!(source_amplitude(&constant, 0.0), Complex64::new(5.0, 0.0));
        assert_eq!(source_amplitude(&constant, 7.3), Complex64::new(5.0, 0.0));
    }
}
