//! Linearized dispersion coefficients for the absorbing boundaries.
//!
//! The exact one-way relation `k = ±sqrt(2 (omega - V))` (atomic units) is
//! replaced by the chord `k = g1 (omega - V) + g2` through the two
//! interpolation energies `alpha1`, `alpha2`. The right boundary takes the
//! outgoing `+` branch, the left boundary the `-` branch.
//!
//! A chord bracketing the dominant energy of the outgoing waves absorbs best;
//! for a packet of mean momentum `p0` that means `alpha1 < p0^2/2 < alpha2`.
//! The choice is left to the caller.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcCoefficients {
    pub g1: f64,
    pub g2: f64,
    pub side: Side,
    pub alpha1: f64,
    pub alpha2: f64,
}

/// Chord coefficients through `(alpha1, ±sqrt(2 alpha1))` and `(alpha2, ±sqrt(2 alpha2))`.
pub fn abc_coefficients(alpha1: f64, alpha2: f64, side: Side) -> Result<AbcCoefficients> {
    if !(alpha1 > 0.0 && alpha2 > 0.0 && alpha1.is_finite() && alpha2.is_finite()) {
        return Err(Error::InvalidAbcCoefficients(format!(
            "interpolation energies must be positive, got {alpha1} and {alpha2}"
        )));
    }
    if alpha1 == alpha2 {
        return Err(Error::DegenerateEnergies(alpha1));
    }
    let (k1, k2) = ((2.0 * alpha1).sqrt(), (2.0 * alpha2).sqrt());
    let span = alpha2 - alpha1;
    let s = side.sign();
    Ok(AbcCoefficients {
        g1: s * (k2 - k1) / span,
        g2: s * (alpha2 * k1 - alpha1 * k2) / span,
        side,
        alpha1,
        alpha2,
    })
}

impl AbcCoefficients {
    /// Linearized wavenumber `g1 (omega - V) + g2`.
    pub fn wavenumber(&self, omega: f64, v: f64) -> f64 {
        self.g1 * (omega - v) + self.g2
    }
}

/// Coefficients for both edges of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcPair {
    pub left: AbcCoefficients,
    pub right: AbcCoefficients,
}

impl AbcPair {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        Ok(Self {
            left: abc_coefficients(alpha1, alpha2, Side::Left)?,
            right: abc_coefficients(alpha1, alpha2, Side::Right)?,
        })
    }
}

/// Drive frequency `(p0 - g2) / g1` whose linearized wavenumber is `p0` at `V = 0`.
pub fn source_omega(p0: f64, g: &AbcCoefficients) -> Result<f64> {
    if g.g1 == 0.0 {
        return Err(Error::InvalidAbcCoefficients("g1 = 0".into()));
    }
    Ok((p0 - g.g2) / g.g1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chord_at_24_25() {
        let g = abc_coefficients(24.0, 25.0, Side::Right).unwrap();
        let g1 = 50f64.sqrt() - 48f64.sqrt();
        let g2 = 25.0 * 48f64.sqrt() - 24.0 * 50f64.sqrt();
        assert!((g.g1 - g1).abs() < 1e-14);
        assert!((g.g2 - g2).abs() < 1e-12);
        assert!((g.g1 - 0.142865).abs() < 1e-6);
        assert!((g.g2 - 3.499453).abs() < 1e-6);
    }

    #[test]
    fn chord_passes_through_nodes() {
        let g = abc_coefficients(12.0, 13.0, Side::Right).unwrap();
        assert!((g.g1 * 12.0 + g.g2 - 24f64.sqrt()).abs() < 1e-12);
        assert!((g.g1 * 13.0 + g.g2 - 26f64.sqrt()).abs() < 1e-12);
        let l = abc_coefficients(12.0, 13.0, Side::Left).unwrap();
        assert!((l.g1 * 12.0 + l.g2 + 24f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn left_is_negated_right() {
        let pair = AbcPair::new(3.0, 7.5).unwrap();
        assert_eq!(pair.left.g1, -pair.right.g1);
        assert_eq!(pair.left.g2, -pair.right.g2);
        assert!(pair.right.g1 > 0.0);
    }

    #[test]
    fn rejects_degenerate_and_nonpositive() {
        assert!(matches!(
            abc_coefficients(5.0, 5.0, Side::Right),
            Err(Error::DegenerateEnergies(_))
        ));
        assert!(abc_coefficients(0.0, 5.0, Side::Right).is_err());
        assert!(abc_coefficients(-1.0, 5.0, Side::Left).is_err());
    }

    #[test]
    fn omega_inverts_chord() {
        let g = abc_coefficients(12.0, 13.0, Side::Right).unwrap();
        let w = source_omega(5.0, &g).unwrap();
        assert!((g.g1 * w + g.g2 - 5.0).abs() < 1e-12);
        let identity = AbcCoefficients {
            g1: 1.0,
            g2: 0.0,
            side: Side::Right,
            alpha1: 1.0,
            alpha2: 2.0,
        };
        assert_eq!(source_omega(3.25, &identity).unwrap(), 3.25);
        let g = abc_coefficients(24.0, 25.0, Side::Right).unwrap();
        let w = source_omega(7.0, &g).unwrap();
        assert!(w > 24.0 && w < 25.0);
        assert!((w - 24.5).abs() < 0.01);
    }

    #[test]
    fn chord_envelope_inside_interval() {
        let (a1, a2) = (24.0, 25.0);
        let g = abc_coefficients(a1, a2, Side::Right).unwrap();
        let bound = (2.0 * a2).sqrt() - (2.0 * a1).sqrt();
        for k in 1..100 {
            let a = a1 + (a2 - a1) * k as f64 / 100.0;
            let gap = (g.g1 * a + g.g2 - (2.0 * a).sqrt()).abs();
            assert!(gap < bound);
            assert!(gap > 0.0);
        }
    }
}
