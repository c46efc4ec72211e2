//! Complex tridiagonal algebra: closed-form (Usmani) inverses built from the
//! forward/backward determinant recurrences, and a Thomas elimination solver.
//!
//! Indices follow the usual row-major 0-based convention. Doc comments quote
//! the recurrences with 1-based labels (`theta_0 = 1`, `theta_1 = a_1`, ...)
//! because that is how they are normally written; `theta(i)` and `phi(i)`
//! accept those labels directly.

mod scaled;

pub use scaled::ScaledComplex;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest N for which a dense N x N inverse/product is materialized.
pub const DENSE_CAP: usize = 4096;

/// `|theta_N|` below this is treated as a vanishing determinant.
const DET_FLOOR: f64 = 1e-300;

/// A Thomas pivot below `PIVOT_RTOL * max|row|` is treated as zero.
const PIVOT_RTOL: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tridiagonal matrix with diagonal `a`, superdiagonal `b` and subdiagonal `c`:
/// `M[i][i] = a[i]`, `M[i][i+1] = b[i]`, `M[i+1][i] = c[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    diag: Vec<Complex64>,
    sup: Vec<Complex64>,
    sub: Vec<Complex64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<Complex64>, sup: Vec<Complex64>, sub: Vec<Complex64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty tridiagonal matrix".into()));
        }
        for v in [&sup, &sub] {
            if v.len() != n - 1 {
                return Err(Error::DimensionMismatch {
                    expected: n - 1,
                    found: v.len(),
                });
            }
        }
        Ok(Self { diag, sup, sub })
    }

    /// Constant-band (Toeplitz) matrix.
    pub fn toeplitz(n: usize, sub: Complex64, diag: Complex64, sup: Complex64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("empty tridiagonal matrix".into()));
        }
        Self::new(vec![diag; n], vec![sup; n - 1], vec![sub; n - 1])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::toeplitz(n, ZERO, ONE, ZERO)
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn sup(&self) -> &[Complex64] {
        &self.sup
    }

    pub fn sub(&self) -> &[Complex64] {
        &self.sub
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.sup[i]
        } else if i == j + 1 {
            self.sub[j]
        } else {
            ZERO
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![ZERO; self.dim()];
        self.mul_vec_into(x, &mut out)?;
        Ok(out)
    }

    pub fn mul_vec_into(&self, x: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let n = self.dim();
        if x.len() != n || out.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if x.len() != n { x.len() } else { out.len() },
            });
        }
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * x[i + 1];
            }
            out[i] = acc;
        }
        Ok(())
    }

    /// `self * rhs`, O(N^2).
    pub fn mul_dense(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.dim();
        if rhs.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rhs.dim(),
            });
        }
        let mut out = DenseMatrix::zeros(n);
        out.data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, slot) in row.iter_mut().enumerate() {
                let mut acc = self.diag[i] * rhs[(i, j)];
                if i > 0 {
                    acc += self.sub[i - 1] * rhs[(i - 1, j)];
                }
                if i + 1 < n {
                    acc += self.sup[i] * rhs[(i + 1, j)];
                }
                *slot = acc;
            }
        });
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in i.saturating_sub(1)..(i + 2).min(n) {
                out[(i, j)] = self.get(i, j);
            }
        }
        out
    }

    fn max_row_magnitude(&self, i: usize) -> f64 {
        let mut m = self.diag[i].norm();
        if i > 0 {
            m = m.max(self.sub[i - 1].norm());
        }
        if i + 1 < self.dim() {
            m = m.max(self.sup[i].norm());
        }
        m
    }
}

/// Row-major N x N complex matrix in one contiguous allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn mul_vec_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.n);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let mut out = vec![ZERO; self.n];
        self.mul_vec_into(x, &mut out);
        Ok(out)
    }

    /// `self * rhs` for a tridiagonal right factor, O(N^2).
    pub fn mul_tridiagonal(&self, rhs: &TridiagonalMatrix) -> Result<DenseMatrix> {
        let n = self.n;
        if rhs.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rhs.dim(),
            });
        }
        let mut out = DenseMatrix::zeros(n);
        out.data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let d = self.row(i);
            for (j, slot) in row.iter_mut().enumerate() {
                let mut acc = d[j] * rhs.diag[j];
                if j > 0 {
                    acc += d[j - 1] * rhs.sup[j - 1];
                }
                if j + 1 < n {
                    acc += d[j + 1] * rhs.sub[j];
                }
                *slot = acc;
            }
        });
        Ok(out)
    }

    /// `max_ij |self_ij - delta_ij|`.
    pub fn max_deviation_from_identity(&self) -> f64 {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .map(|(k, z)| {
                if k / n == k % n {
                    (z - ONE).norm()
                } else {
                    z.norm()
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Forward and backward determinant recurrences of a tridiagonal matrix.
///
/// `theta_i = a_i theta_{i-1} - b_{i-1} c_{i-1} theta_{i-2}` from
/// `theta_0 = 1, theta_1 = a_1`, and
/// `phi_i = a_i phi_{i+1} - b_i c_i phi_{i+2}` from `phi_{N+1} = 1, phi_N = a_N`.
/// `theta_N` is the determinant.
#[derive(Debug, Clone)]
pub struct UsmaniFactors {
    theta: Vec<ScaledComplex>,
    phi: Vec<ScaledComplex>,
}

impl UsmaniFactors {
    pub fn n(&self) -> usize {
        self.theta.len() - 1
    }

    /// `theta_i`, `i = 0..=N`.
    pub fn theta(&self, i: usize) -> ScaledComplex {
        self.theta[i]
    }

    /// `phi_i`, `i = 1..=N+1`.
    pub fn phi(&self, i: usize) -> ScaledComplex {
        assert!(i >= 1, "phi is labelled from 1");
        self.phi[i]
    }

    pub fn determinant(&self) -> ScaledComplex {
        self.theta[self.n()]
    }

    fn from_sequences(theta: Vec<ScaledComplex>, phi: Vec<ScaledComplex>) -> Result<Self> {
        let det = theta[theta.len() - 1];
        if !det.is_finite() || det.is_zero() || det.ln_abs() < DET_FLOOR.ln() {
            return Err(Error::SingularMatrix(format!(
                "|det| = exp({:.3})",
                det.ln_abs()
            )));
        }
        Ok(Self { theta, phi })
    }
}

pub fn usmani_factors(m: &TridiagonalMatrix) -> Result<UsmaniFactors> {
    let n = m.dim();
    let (a, b, c) = (&m.diag, &m.sup, &m.sub);
    let mut theta = vec![ScaledComplex::ZERO; n + 1];
    theta[0] = ScaledComplex::ONE;
    theta[1] = a[0].into();
    for i in 2..=n {
        let coupling = ScaledComplex::new(b[i - 2] * c[i - 2]);
        theta[i] = theta[i - 1].scale(a[i - 1]) - coupling * theta[i - 2];
    }
    // phi[0] is unused so that phi[i] carries the 1-based label i.
    let mut phi = vec![ScaledComplex::ZERO; n + 2];
    phi[n + 1] = ScaledComplex::ONE;
    phi[n] = a[n - 1].into();
    for i in (1..n).rev() {
        let coupling = ScaledComplex::new(b[i - 1] * c[i - 1]);
        phi[i] = phi[i + 1].scale(a[i - 1]) - coupling * phi[i + 2];
    }
    UsmaniFactors::from_sequences(theta, phi)
}

fn check_dense_cap(n: usize) -> Result<()> {
    if n > DENSE_CAP {
        return Err(Error::DensePathCapExceeded { n, cap: DENSE_CAP });
    }
    Ok(())
}

/// Full inverse from the closed form
/// `(M^-1)_ij = (-1)^(i+j) b_i...b_{j-1} theta_{i-1} phi_{j+1} / theta_N` for `i <= j`
/// and `(-1)^(i+j) c_j...c_{i-1} theta_{j-1} phi_{i+1} / theta_N` for `i > j`.
pub fn usmani_inverse(m: &TridiagonalMatrix) -> Result<DenseMatrix> {
    let n = m.dim();
    check_dense_cap(n)?;
    let f = usmani_factors(m)?;
    let det = f.determinant();
    let mut out = DenseMatrix::zeros(n);
    out.data.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
        let i = r + 1;
        // upper part, j >= i: accumulate -b_{j-1} into the product.
        let left = f.theta(i - 1) / det;
        let mut prod = ScaledComplex::ONE;
        for j in i..=n {
            if j > i {
                prod = prod.scale(-m.sup[j - 2]);
            }
            row[j - 1] = (prod * left * f.phi(j + 1)).to_complex();
        }
        // lower part, j < i: accumulate -c_j walking leftwards.
        let right = f.phi(i + 1) / det;
        let mut prod = ScaledComplex::ONE;
        for j in (1..i).rev() {
            prod = prod.scale(-m.sub[j - 1]);
            row[j - 1] = (prod * f.theta(j - 1) * right).to_complex();
        }
    });
    Ok(out)
}

/// Common off-diagonal `-alpha` of a symmetric constant-band matrix.
fn constant_offdiag(m: &TridiagonalMatrix) -> Result<Complex64> {
    let Some(&first) = m.sup.first() else {
        return Ok(ZERO);
    };
    if m.sup.iter().chain(&m.sub).any(|&z| z != first) {
        return Err(Error::NotSymmetricOffdiag);
    }
    Ok(first)
}

/// Inverse of a tridiagonal matrix whose off-diagonals all equal `-alpha`:
/// `d_ij = (-1)^(i+j) (-alpha)^|j-i| theta_{i-1} phi_{j+1} / theta_N` for
/// `i <= j`, mirrored to `d_ji = d_ij`.
pub fn symmetric_inverse(m: &TridiagonalMatrix) -> Result<DenseMatrix> {
    let n = m.dim();
    check_dense_cap(n)?;
    let off = constant_offdiag(m)?;
    let f = usmani_factors(m)?;
    let det = f.determinant();
    let alpha = -off;
    let step = ScaledComplex::new(alpha);
    let mut out = DenseMatrix::zeros(n);
    out.data.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
        let i = r + 1;
        let left = f.theta(i - 1) / det;
        // (-1)^(i+j) (-alpha)^(j-i) = (+alpha)^(j-i) with alpha = -off
        let mut power = ScaledComplex::ONE;
        for j in i..=n {
            if j > i {
                power = power * step;
            }
            row[j - 1] = (power * left * f.phi(j + 1)).to_complex();
        }
    });
    for i in 0..n {
        for j in 0..i {
            out[(i, j)] = out[(j, i)];
        }
    }
    Ok(out)
}

/// Parameters read off an absorbing-boundary matrix: `a_1 = a_N = eta2`,
/// `b_1 = c_{N-1} = eta1`, every other off-diagonal `-alpha`.
#[derive(Debug, Clone, Copy)]
struct AbcShape {
    eta1: Complex64,
    eta2: Complex64,
    alpha: Complex64,
}

fn abc_shape(m: &TridiagonalMatrix) -> Result<AbcShape> {
    let n = m.dim();
    if n < 3 {
        return Err(Error::ShapeMismatch(format!("need N >= 3, got {n}")));
    }
    let (a, b, c) = (&m.diag, &m.sup, &m.sub);
    if a[0] != a[n - 1] {
        return Err(Error::ShapeMismatch("a_1 != a_N".into()));
    }
    if b[0] != c[n - 2] {
        return Err(Error::ShapeMismatch("b_1 != c_(N-1)".into()));
    }
    let minus_alpha = b[1];
    if b[1..].iter().chain(&c[..n - 2]).any(|&z| z != minus_alpha) {
        return Err(Error::ShapeMismatch(
            "interior off-diagonals are not a common constant".into(),
        ));
    }
    Ok(AbcShape {
        eta1: b[0],
        eta2: a[0],
        alpha: -minus_alpha,
    })
}

/// Recurrences specialized to the absorbing-boundary shape.
fn abc_factors(m: &TridiagonalMatrix, s: AbcShape) -> Result<UsmaniFactors> {
    let n = m.dim();
    let xi = &m.diag;
    let alpha_sq = ScaledComplex::new(s.alpha * s.alpha);
    let alpha_eta1 = ScaledComplex::new(s.alpha * s.eta1);

    let mut theta = vec![ScaledComplex::ZERO; n + 1];
    theta[0] = ScaledComplex::ONE;
    theta[1] = s.eta2.into();
    theta[2] = ScaledComplex::new(xi[1] * s.eta2 + s.alpha * s.eta1);
    for i in 3..n {
        theta[i] = theta[i - 1].scale(xi[i - 1]) - alpha_sq * theta[i - 2];
    }
    theta[n] = theta[n - 1].scale(s.eta2) + alpha_eta1 * theta[n - 2];

    let mut phi = vec![ScaledComplex::ZERO; n + 2];
    phi[n + 1] = ScaledComplex::ONE;
    phi[n] = s.eta2.into();
    phi[n - 1] = ScaledComplex::new(xi[n - 2] * s.eta2 + s.alpha * s.eta1);
    for i in (2..n - 1).rev() {
        phi[i] = phi[i + 1].scale(xi[i - 1]) - alpha_sq * phi[i + 2];
    }
    phi[1] = phi[2].scale(s.eta2) + alpha_eta1 * phi[3];

    UsmaniFactors::from_sequences(theta, phi)
}

/// Inverse of the absorbing-boundary matrix via its five-case closed form.
pub fn abc_inverse(m: &TridiagonalMatrix) -> Result<DenseMatrix> {
    let n = m.dim();
    check_dense_cap(n)?;
    let shape = abc_shape(m)?;
    let f = abc_factors(m, shape)?;
    let det = f.determinant();
    let minus_alpha = ScaledComplex::new(-shape.alpha);
    let eta1 = ScaledComplex::new(shape.eta1);

    let mut out = DenseMatrix::zeros(n);
    out.data.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
        let i = r + 1;
        if i == 1 {
            // d_11 = phi_2 / theta_N
            // d_1j = (-1)^(1+j) eta1 (-alpha)^(j-2) phi_{j+1} / theta_N
            row[0] = (f.phi(2) / det).to_complex();
            let mut coef = -eta1 / det;
            for j in 2..=n {
                if j > 2 {
                    coef = -(coef * minus_alpha);
                }
                row[j - 1] = (coef * f.phi(j + 1)).to_complex();
            }
            return;
        }
        if i == n {
            // d_Nj = (-1)^(N+j) eta1 (-alpha)^(N-j-1) theta_{j-1} / theta_N
            row[n - 1] = (f.theta(n - 1) / det).to_complex();
            let mut coef = -eta1 / det;
            for j in (1..n).rev() {
                if j < n - 1 {
                    coef = -(coef * minus_alpha);
                }
                row[j - 1] = (coef * f.theta(j - 1)).to_complex();
            }
            return;
        }
        // 2 <= i <= N-1
        // i <= j: (-1)^(i+j) (-alpha)^(j-i) theta_{i-1} phi_{j+1} / theta_N
        let left = f.theta(i - 1) / det;
        let mut coef = ScaledComplex::ONE;
        for j in i..=n {
            if j > i {
                coef = -(coef * minus_alpha);
            }
            row[j - 1] = (coef * left * f.phi(j + 1)).to_complex();
        }
        // i > j: (-1)^(i+j) (-alpha)^(i-j) theta_{j-1} phi_{i+1} / theta_N
        let right = f.phi(i + 1) / det;
        let mut coef = ScaledComplex::ONE;
        for j in (1..i).rev() {
            coef = -(coef * minus_alpha);
            row[j - 1] = (coef * f.theta(j - 1) * right).to_complex();
        }
    });
    Ok(out)
}

/// LU factors of a tridiagonal matrix without pivoting, reusable across
/// right-hand sides.
#[derive(Debug, Clone)]
pub struct ThomasFactors {
    sup: Vec<Complex64>,
    lower: Vec<Complex64>,
    pivots: Vec<Complex64>,
}

impl ThomasFactors {
    pub fn new(m: &TridiagonalMatrix) -> Result<Self> {
        let n = m.dim();
        let mut pivots = Vec::with_capacity(n);
        let mut lower = Vec::with_capacity(n.saturating_sub(1));
        let check = |i: usize, u: Complex64| -> Result<Complex64> {
            if !u.is_finite() || u.norm() < PIVOT_RTOL * m.max_row_magnitude(i) || u == ZERO {
                return Err(Error::SingularMatrix(format!("zero pivot at row {i}")));
            }
            Ok(u)
        };
        pivots.push(check(0, m.diag[0])?);
        for i in 1..n {
            let l = m.sub[i - 1] / pivots[i - 1];
            lower.push(l);
            pivots.push(check(i, m.diag[i] - l * m.sup[i - 1])?);
        }
        Ok(Self {
            sup: m.sup.clone(),
            lower,
            pivots,
        })
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Overwrites `x` (holding the right-hand side) with the solution.
    pub fn solve_in_place(&self, x: &mut [Complex64]) -> Result<()> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
        for i in 1..n {
            let prev = x[i - 1];
            x[i] -= self.lower[i - 1] * prev;
        }
        x[n - 1] /= self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] = (x[i] - self.sup[i] * next) / self.pivots[i];
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    /// `ln|det|` as the sum of log pivot magnitudes.
    pub fn ln_abs_determinant(&self) -> f64 {
        self.pivots.iter().map(|u| u.norm().ln()).sum()
    }
}

/// Solves `m x = rhs` by Thomas elimination.
pub fn thomas_solve(m: &TridiagonalMatrix, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    ThomasFactors::new(m)?.solve(rhs)
}
