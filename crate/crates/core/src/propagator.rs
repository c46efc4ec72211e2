//! Crank-Nicolson propagation in Cayley form.
//!
//! One step solves `D2 psi^{n+1} = D1 psi^n - b^n` with
//! `D1 = 1 - (i dt/2) H` and `D2 = 1 + (i dt/2) H` on the three-point
//! Laplacian. Two interchangeable strategies are provided:
//!
//! * [`Strategy::TridiagonalSolve`] factors `D2` once and does an O(N) solve
//!   per step (the default);
//! * [`Strategy::DenseInverse`] materializes `D2^-1` in closed form and the
//!   product `E = D2^-1 D1`, then applies `E` as an O(N^2) matrix-vector
//!   product. For Dirichlet boundaries `E = 2 D2^-1 - 1`.
//!
//! With absorbing boundaries the first and last rows of `D1`/`D2` are
//! replaced by a discretized one-way wave equation evaluated between the
//! two outermost sites.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::abc::{AbcPair, Side};
use crate::error::{Error, Result};
use crate::lattice::{SpatialGrid, WaveFunction};
use crate::physics::source_amplitude;
use crate::tridiag::{
    abc_inverse, symmetric_inverse, DenseMatrix, ThomasFactors, TridiagonalMatrix, DENSE_CAP,
};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    Dirichlet,
    Abc,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "dense")]
    DenseInverse,
    #[default]
    #[serde(rename = "solve")]
    TridiagonalSolve,
}

/// Lattice coefficients: `alpha = i dt / (4 dx^2)`,
/// `beta_j = (i dt / 2)(1/dx^2 + V_j)`, `gamma_j = 1 - beta_j`, `xi_j = 1 + beta_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeParameters {
    pub alpha: Complex64,
    pub beta: Vec<Complex64>,
    pub gamma: Vec<Complex64>,
    pub xi: Vec<Complex64>,
}

impl SchemeParameters {
    pub fn new(grid: &SpatialGrid, potential: &[f64], dt: f64) -> Result<Self> {
        if potential.len() != grid.n_sites() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_sites(),
                found: potential.len(),
            });
        }
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time step must be finite and nonzero, got {dt}"
            )));
        }
        let inv_dx2 = 1.0 / (grid.dx() * grid.dx());
        let half = I * (0.5 * dt);
        let beta: Vec<_> = potential.iter().map(|&v| half * (inv_dx2 + v)).collect();
        Ok(Self {
            alpha: I * (dt * 0.25 * inv_dx2),
            gamma: beta.iter().map(|b| 1.0 - b).collect(),
            xi: beta.iter().map(|b| 1.0 + b).collect(),
            beta,
        })
    }
}

/// Boundary-row entries. `eta1 = eta2 = i / (2 dt)` sit in `D2`; the
/// `*_edge` / `*_inner` pairs are the `D1` entries on the outermost site and
/// its neighbour (`eta4` / `eta3` for the right edge).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcRows {
    pub eta1: Complex64,
    pub eta2: Complex64,
    pub left_edge: Complex64,
    pub left_inner: Complex64,
    pub right_edge: Complex64,
    pub right_inner: Complex64,
}

impl AbcRows {
    /// `eta3 = i/(2dt) + i/(g1 dx) + (V - g2/g1)/2`,
    /// `eta4 = i/(2dt) - i/(g1 dx) + (V - g2/g1)/2` with the right-edge
    /// coefficients; the left edge uses its own (negated) coefficients on the
    /// mirrored stencil. `V` is the potential at the respective edge site.
    pub fn new(g: &AbcPair, dt: f64, dx: f64, v_left: f64, v_right: f64) -> Result<Self> {
        for (c, side) in [(&g.left, Side::Left), (&g.right, Side::Right)] {
            if c.side != side {
                return Err(Error::InvalidAbcCoefficients(format!(
                    "{side:?} boundary given {:?} coefficients",
                    c.side
                )));
            }
            if c.g1 == 0.0 || !c.g1.is_finite() || !c.g2.is_finite() {
                return Err(Error::InvalidAbcCoefficients(format!(
                    "g1 = {}, g2 = {}",
                    c.g1, c.g2
                )));
            }
        }
        let eta = I / (2.0 * dt);
        let (r, l) = (&g.right, &g.left);
        let right_shift = Complex64::new(0.5 * (v_right - r.g2 / r.g1), 0.0);
        let left_shift = Complex64::new(0.5 * (v_left - l.g2 / l.g1), 0.0);
        let right_flux = I / (r.g1 * dx);
        let left_flux = I / (l.g1 * dx);
        Ok(Self {
            eta1: eta,
            eta2: eta,
            right_edge: eta - right_flux + right_shift,
            right_inner: eta + right_flux + right_shift,
            left_edge: eta + left_flux + left_shift,
            left_inner: eta - left_flux + left_shift,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Ramp {
    Constant,
    Exponential { time_constant: f64 },
}

/// Point drive `S(t) exp(-i omega t)` at `site`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub s0: Complex64,
    pub ramp: Ramp,
    pub omega: f64,
    pub site: usize,
}

impl SourceSpec {
    fn validate(&self, n_sites: usize) -> Result<()> {
        if self.site >= n_sites {
            return Err(Error::IndexOutOfRange {
                index: self.site,
                len: n_sites,
            });
        }
        if let Ramp::Exponential { time_constant } = self.ramp {
            if !(time_constant > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "ramp time constant must be positive, got {time_constant}"
                )));
            }
        }
        Ok(())
    }
}

/// The single nonzero entry of `b^n`:
/// `(i dt / 2)(1/dx)[S(t_n) e^{-i omega t_n} + S(t_{n+1}) e^{-i omega t_{n+1}}]`.
/// The `1/dx` is the height of the unit-area box standing in for the delta
/// function on the lattice.
pub fn source_weight(source: &SourceSpec, n: usize, dt: f64, dx: f64, t0: f64) -> Complex64 {
    let drive =
        |t: f64| source_amplitude(source, t) * Complex64::from_polar(1.0, -source.omega * t);
    let (t_n, t_next) = (t0 + n as f64 * dt, t0 + (n + 1) as f64 * dt);
    I * (0.5 * dt / dx) * (drive(t_n) + drive(t_next))
}

pub fn source_vector(
    source: &SourceSpec,
    n: usize,
    dt: f64,
    grid: &SpatialGrid,
    t0: f64,
) -> Result<Vec<Complex64>> {
    source.validate(grid.n_sites())?;
    let mut b = vec![ZERO; grid.n_sites()];
    b[source.site] = source_weight(source, n, dt, grid.dx(), t0);
    Ok(b)
}

#[derive(Debug, Clone)]
struct DenseEvolution {
    inverse: DenseMatrix,
    product: DenseMatrix,
}

#[derive(Debug, Clone)]
pub struct EvolutionOperator {
    mode: BoundaryMode,
    strategy: Strategy,
    grid: SpatialGrid,
    dt: f64,
    params: SchemeParameters,
    abc: Option<AbcRows>,
    d1: TridiagonalMatrix,
    d2: TridiagonalMatrix,
    solver: ThomasFactors,
    dense: Option<DenseEvolution>,
}

fn require_sites(grid: &SpatialGrid) -> Result<()> {
    if grid.n_sites() < 3 {
        return Err(Error::InvalidGrid(format!(
            "propagation needs at least 3 sites, got {}",
            grid.n_sites()
        )));
    }
    Ok(())
}

/// Dirichlet evolution matrices: `D1 = tridiag(alpha, gamma_j, alpha)`,
/// `D2 = tridiag(-alpha, xi_j, -alpha)`.
pub fn build_dirichlet(
    grid: &SpatialGrid,
    potential: &[f64],
    dt: f64,
) -> Result<EvolutionOperator> {
    require_sites(grid)?;
    let params = SchemeParameters::new(grid, potential, dt)?;
    let n = grid.n_sites();
    let a = params.alpha;
    let d1 = TridiagonalMatrix::new(params.gamma.clone(), vec![a; n - 1], vec![a; n - 1])?;
    let d2 = TridiagonalMatrix::new(params.xi.clone(), vec![-a; n - 1], vec![-a; n - 1])?;
    EvolutionOperator::assemble(BoundaryMode::Dirichlet, *grid, dt, params, None, d1, d2)
}

/// Absorbing-boundary evolution matrices: interior rows as in the Dirichlet
/// case, rows 1 and N of `D2` are `(eta2, eta1)` / `(eta1, eta2)` and of `D1`
/// `(eta4, eta3)` / `(eta3, eta4)`.
pub fn build_abc(
    grid: &SpatialGrid,
    potential: &[f64],
    dt: f64,
    g: &AbcPair,
) -> Result<EvolutionOperator> {
    require_sites(grid)?;
    let params = SchemeParameters::new(grid, potential, dt)?;
    let n = grid.n_sites();
    if potential[0] != potential[1] || potential[n - 1] != potential[n - 2] {
        log::warn!("potential is not constant across the outermost cells; boundary rows use the edge-site value");
    }
    let rows = AbcRows::new(g, dt, grid.dx(), potential[0], potential[n - 1])?;
    let a = params.alpha;

    let mut diag1 = params.gamma.clone();
    let mut sup1 = vec![a; n - 1];
    let mut sub1 = vec![a; n - 1];
    diag1[0] = rows.left_edge;
    sup1[0] = rows.left_inner;
    diag1[n - 1] = rows.right_edge;
    sub1[n - 2] = rows.right_inner;

    let mut diag2 = params.xi.clone();
    let mut sup2 = vec![-a; n - 1];
    let mut sub2 = vec![-a; n - 1];
    diag2[0] = rows.eta2;
    sup2[0] = rows.eta1;
    diag2[n - 1] = rows.eta2;
    sub2[n - 2] = rows.eta1;

    let d1 = TridiagonalMatrix::new(diag1, sup1, sub1)?;
    let d2 = TridiagonalMatrix::new(diag2, sup2, sub2)?;
    EvolutionOperator::assemble(BoundaryMode::Abc, *grid, dt, params, Some(rows), d1, d2)
}

/// Populates the dense inverse and product, switching the operator to the
/// dense strategy.
pub fn build_dense_product(op: EvolutionOperator) -> Result<EvolutionOperator> {
    op.with_strategy(Strategy::DenseInverse)
}

impl EvolutionOperator {
    fn assemble(
        mode: BoundaryMode,
        grid: SpatialGrid,
        dt: f64,
        params: SchemeParameters,
        abc: Option<AbcRows>,
        d1: TridiagonalMatrix,
        d2: TridiagonalMatrix,
    ) -> Result<Self> {
        let solver = ThomasFactors::new(&d2)?;
        Ok(Self {
            mode,
            strategy: Strategy::TridiagonalSolve,
            grid,
            dt,
            params,
            abc,
            d1,
            d2,
            solver,
            dense: None,
        })
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn params(&self) -> &SchemeParameters {
        &self.params
    }

    pub fn abc_rows(&self) -> Option<&AbcRows> {
        self.abc.as_ref()
    }

    pub fn d1(&self) -> &TridiagonalMatrix {
        &self.d1
    }

    pub fn d2(&self) -> &TridiagonalMatrix {
        &self.d2
    }

    /// `E = D2^-1 D1`, present once the dense strategy has been requested.
    pub fn product(&self) -> Option<&DenseMatrix> {
        self.dense.as_ref().map(|d| &d.product)
    }

    pub fn inverse(&self) -> Option<&DenseMatrix> {
        self.dense.as_ref().map(|d| &d.inverse)
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Result<Self> {
        if strategy == Strategy::DenseInverse && self.dense.is_none() {
            self.dense = Some(self.dense_evolution()?);
        }
        self.strategy = strategy;
        Ok(self)
    }

    fn dense_evolution(&self) -> Result<DenseEvolution> {
        let n = self.grid.n_sites();
        if n > DENSE_CAP {
            return Err(Error::DensePathCapExceeded { n, cap: DENSE_CAP });
        }
        let (inverse, product) = match self.mode {
            BoundaryMode::Dirichlet => {
                // E_ij = 2 d_ij - delta_ij
                let inverse = symmetric_inverse(&self.d2)?;
                let mut product = inverse.clone();
                for i in 0..n {
                    for j in 0..n {
                        product[(i, j)] *= 2.0;
                    }
                    product[(i, i)] -= 1.0;
                }
                (inverse, product)
            }
            BoundaryMode::Abc => {
                // Column j of E only touches columns j-1..=j+1 of D2^-1; with
                // the boundary rows of D1 this gives E_i1 = eta4 d_i1 + alpha d_i2,
                // E_i2 = eta3 d_i1 + gamma_2 d_i2 + alpha d_i3, the interior
                // alpha/gamma_j/alpha stencil, and the mirrored last two columns.
                let inverse = abc_inverse(&self.d2)?;
                let product = inverse.mul_tridiagonal(&self.d1)?;
                (inverse, product)
            }
        };
        Ok(DenseEvolution { inverse, product })
    }

    fn check_state(&self, psi: &WaveFunction) -> Result<()> {
        if psi.grid() != &self.grid {
            return Err(Error::InvalidArgument(
                "wavefunction grid differs from the operator grid".into(),
            ));
        }
        Ok(())
    }

    /// `psi^{n+1}` from `psi^n`; `n` and `t0` place the source samples at
    /// `t_n = t0 + n dt` and `t_{n+1}`.
    pub fn step(
        &self,
        psi: &WaveFunction,
        source: Option<&SourceSpec>,
        n: usize,
        t0: f64,
    ) -> Result<WaveFunction> {
        let mut next = psi.clone();
        let mut scratch = Vec::new();
        self.advance(&mut next, &mut scratch, source, n, t0)?;
        Ok(next)
    }

    /// In-place variant of [`step`](Self::step); `scratch` is resized as needed.
    pub fn advance(
        &self,
        psi: &mut WaveFunction,
        scratch: &mut Vec<Complex64>,
        source: Option<&SourceSpec>,
        n: usize,
        t0: f64,
    ) -> Result<()> {
        self.check_state(psi)?;
        let n_sites = self.grid.n_sites();
        let drive = match source {
            Some(s) => {
                s.validate(n_sites)?;
                Some((s.site, source_weight(s, n, self.dt, self.grid.dx(), t0)))
            }
            None => None,
        };
        scratch.resize(n_sites, ZERO);
        match self.strategy {
            Strategy::TridiagonalSolve => {
                self.d1.mul_vec_into(psi.amplitudes(), scratch)?;
                if let Some((site, b)) = drive {
                    scratch[site] -= b;
                }
                self.solver.solve_in_place(scratch)?;
            }
            Strategy::DenseInverse => {
                let dense = self
                    .dense
                    .as_ref()
                    .expect("dense strategy always carries its matrices");
                dense.product.mul_vec_into(psi.amplitudes(), scratch);
                if let Some((site, b)) = drive {
                    for (i, out) in scratch.iter_mut().enumerate() {
                        *out -= dense.inverse[(i, site)] * b;
                    }
                }
            }
        }
        if scratch.iter().any(|z| !z.is_finite()) {
            return Err(Error::SingularMatrix(
                "non-finite amplitude after step".into(),
            ));
        }
        psi.amplitudes_mut().copy_from_slice(scratch);
        Ok(())
    }
}
