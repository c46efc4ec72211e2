//! Complex numbers with an explicit binary exponent.
//!
//! The forward/backward determinant recurrences grow (or decay) like
//! `|xi|^N`, and the off-diagonal products in the inverse decay like
//! `|alpha|^|i-j|`. Either side leaves the f64 range on realistic grids, so
//! these quantities are carried as `mantissa * 2^exponent` and only the final
//! ratio is materialized.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    mant: Complex64,
    exp: i64,
}

/// `2^e` for `e` in the normal exponent range.
#[inline]
fn pow2(e: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((1023 + e) as u64) << 52)
}

/// `x * 2^e` without intermediate overflow.
pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    if (-1022..=1023).contains(&e) {
        return x * pow2(e);
    }
    const STEP: i64 = 1000;
    let up = 2f64.powi(STEP as i32);
    let down = 2f64.powi(-STEP as i32);
    e = e.clamp(-4 * STEP, 4 * STEP);
    while e > STEP {
        x *= up;
        e -= STEP;
    }
    while e < -STEP {
        x *= down;
        e += STEP;
    }
    x * 2f64.powi(e as i32)
}

/// Binary exponent `e` with `2^e <= m < 2^(e+1)` for finite positive `m`.
fn exponent_of(m: f64) -> i64 {
    let bits = m.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        exponent_of(m * 2f64.powi(64)) - 64
    } else {
        biased - 1023
    }
}

impl ScaledComplex {
    pub const ZERO: Self = Self {
        mant: Complex64::new(0.0, 0.0),
        exp: 0,
    };
    pub const ONE: Self = Self {
        mant: Complex64::new(1.0, 0.0),
        exp: 0,
    };

    pub fn new(z: Complex64) -> Self {
        Self { mant: z, exp: 0 }.normalized()
    }

    fn normalized(self) -> Self {
        let m = self.mant.re.abs().max(self.mant.im.abs());
        if m == 0.0 || !m.is_finite() {
            return Self {
                mant: self.mant,
                exp: if m == 0.0 { 0 } else { self.exp },
            };
        }
        let e = exponent_of(m);
        Self {
            mant: Complex64::new(ldexp(self.mant.re, -e), ldexp(self.mant.im, -e)),
            exp: self.exp + e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mant.is_finite()
    }

    /// Value as an ordinary complex number (may under/overflow).
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(ldexp(self.mant.re, self.exp), ldexp(self.mant.im, self.exp))
    }

    /// Natural log of the modulus; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        self.mant.norm().ln() + self.exp as f64 * std::f64::consts::LN_2
    }

    pub fn scale(self, z: Complex64) -> Self {
        Self {
            mant: self.mant * z,
            exp: self.exp,
        }
        .normalized()
    }

    fn aligned_sum(self, other: Self, sign: f64) -> Self {
        if other.is_zero() {
            return self;
        }
        if self.is_zero() {
            return Self {
                mant: other.mant * sign,
                exp: other.exp,
            };
        }
        let (hi, lo, lo_sign, hi_sign) = if self.exp >= other.exp {
            (self, other, sign, 1.0)
        } else {
            (other, self, 1.0, sign)
        };
        let shift = hi.exp - lo.exp;
        let lo_mant = if shift > 1100 {
            Complex64::new(0.0, 0.0)
        } else {
            lo.mant * ldexp(1.0, -shift)
        };
        Self {
            mant: hi.mant * hi_sign + lo_mant * lo_sign,
            exp: hi.exp,
        }
        .normalized()
    }
}

impl Add for ScaledComplex {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        self.aligned_sum(other, 1.0)
    }
}

impl Sub for ScaledComplex {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        self.aligned_sum(other, -1.0)
    }
}

impl From<Complex64> for ScaledComplex {
    fn from(z: Complex64) -> Self {
        Self::new(z)
    }
}

impl Mul for ScaledComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            mant: self.mant * rhs.mant,
            exp: self.exp + rhs.exp,
        }
        .normalized()
    }
}

impl Div for ScaledComplex {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self {
            mant: self.mant / rhs.mant,
            exp: self.exp - rhs.exp,
        }
        .normalized()
    }
}

impl Neg for ScaledComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn round_trips_ordinary_values() {
        for z in [
            c(1.0, 0.0),
            c(-3.5, 2.25),
            c(1e-300, 7e-301),
            c(0.0, -1e200),
        ] {
            let s = ScaledComplex::new(z);
            assert_eq!(s.to_complex(), z);
        }
        assert!(ScaledComplex::new(c(0.0, 0.0)).is_zero());
    }

    #[test]
    fn products_beyond_f64_range() {
        let big = ScaledComplex::new(c(1e200, 0.0));
        let tiny = ScaledComplex::new(c(0.0, 1e-250));
        let sq = big * big;
        assert!((sq.ln_abs() - 400.0 * std::f64::consts::LN_10).abs() < 1e-9);
        let back = (sq * tiny * tiny) / big;
        let z = back.to_complex();
        assert!((z - c(-1e-300, 0.0)).norm() < 1e-312);
    }

    #[test]
    fn sums_align_exponents() {
        let a = ScaledComplex::new(c(3.0, 1.0));
        let b = ScaledComplex::new(c(-1.0, 0.5));
        assert_eq!((a + b).to_complex(), c(2.0, 1.5));
        assert_eq!((a - b).to_complex(), c(4.0, 0.5));
        let huge = ScaledComplex::new(c(1e300, 0.0)) * ScaledComplex::new(c(1e300, 0.0));
        assert_eq!(huge + a, huge);
        assert_eq!((ScaledComplex::ZERO - a).to_complex(), c(-3.0, -1.0));
    }

    #[test]
    fn subnormal_exponent() {
        let z = c(5e-320, 0.0);
        assert_eq!(ScaledComplex::new(z).to_complex(), z);
    }
}
