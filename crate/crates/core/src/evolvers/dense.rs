//! Explicit generator matrices on small grids, exponentiated by
//! eigendecomposition.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::PotentialSpec;
use crate::encoding::EnlargedState;
use crate::grid::{ComplexField, Grid1D, Spectral};
use crate::spin::{hermitian_deviation, pauli};
use crate::transforms::TildeCoeffs;
use crate::{Error, Result};

pub const MAX_GRID_POINTS: usize = 64;
pub const MAX_DENSE_DIM: usize = 256;
pub const ASSEMBLY_TOL: f64 = 1e-10;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

fn check_grid(grid: &Grid1D) -> Result<()> {
    if grid.n_points() > MAX_GRID_POINTS {
        return Err(Error::DimensionCap {
            required: grid.n_points(),
            allowed: MAX_GRID_POINTS,
        });
    }
    Ok(())
}

/// Spectral `p = -i∂_x` as a matrix, Nyquist mode removed.
pub fn momentum_matrix(grid: &Grid1D) -> Result<DMatrix<Complex64>> {
    check_grid(grid)?;
    let n = grid.n_points();
    let spectral = Spectral::new(grid);
    let mut p = DMatrix::zeros(n, n);
    for col in 0..n {
        let mut e = vec![C0; n];
        e[col] = C1;
        let pe = spectral.momentum(&ComplexField::new(*grid, e)?);
        for (row, z) in pe.amplitudes().iter().enumerate() {
            p[(row, col)] = *z;
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| (p[(i, j)] + p[(j, i)].conj()) * 0.5))
}

/// Index parity `j → (N - j) mod N`.
pub fn parity_matrix(grid: &Grid1D) -> DMatrix<Complex64> {
    let n = grid.n_points();
    DMatrix::from_fn(n, n, |i, j| if grid.mirror_index(j) == i { C1 } else { C0 })
}

fn diag(values: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(v, 0.0)),
    ))
}

fn kron3(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, c: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(&b.kronecker(c))
}

fn sigma(j: u8) -> DMatrix<Complex64> {
    pauli(j).expect("valid index").into_matrix()
}

fn eye(n: usize) -> DMatrix<Complex64> {
    DMatrix::identity(n, n)
}

/// `(t1·I + t2·σ_x) ⊗ p`.
pub fn assemble_free_enlarged(grid: &Grid1D, tilde: TildeCoeffs) -> Result<DMatrix<Complex64>> {
    let p = momentum_matrix(grid)?;
    let axis = eye(2) * Complex64::new(tilde.t1, 0.0) + sigma(1) * Complex64::new(tilde.t2, 0.0);
    Ok(axis.kronecker(&p))
}

/// `p σ_y⊗σ_x + m I⊗σ_z + V^e I⊗σ_x + V^o σ_x⊗σ_x`, axis ⊗ spinor ⊗ grid.
pub fn assemble_dirac_parity(grid: &Grid1D, mass: f64, potential: &PotentialSpec) -> Result<DMatrix<Complex64>> {
    let p = momentum_matrix(grid)?;
    let v = potential.sample(grid);
    let n = grid.n_points();
    Ok(kron3(&sigma(2), &sigma(1), &p)
        + kron3(&eye(2), &sigma(3), &eye(n)) * Complex64::new(mass, 0.0)
        + kron3(&eye(2), &sigma(1), &diag(&v.even))
        + kron3(&sigma(1), &sigma(1), &diag(&v.odd)))
}

/// `i σ_x p Π_x + m σ_z + σ_x V` on the simulated space, spinor ⊗ grid.
pub fn assemble_dirac_simulated(grid: &Grid1D, mass: f64, potential: &PotentialSpec) -> Result<DMatrix<Complex64>> {
    let p = momentum_matrix(grid)?;
    let pi = parity_matrix(grid);
    let v = potential.sample(grid);
    let n = grid.n_points();
    let kinetic = (&p * &pi) * Complex64::new(0.0, 1.0);
    Ok(sigma(1).kronecker(&kinetic)
        + sigma(3).kronecker(&eye(n)) * Complex64::new(mass, 0.0)
        + sigma(1).kronecker(&diag(&v.full)))
}

/// Hermitian generator with its eigendecomposition.
#[derive(Debug, Clone)]
pub struct DenseOracle {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl DenseOracle {
    pub fn new(h: DMatrix<Complex64>) -> Result<Self> {
        if h.nrows() > MAX_DENSE_DIM || h.nrows() != h.ncols() {
            return Err(Error::DimensionCap {
                required: h.nrows().max(h.ncols()),
                allowed: MAX_DENSE_DIM,
            });
        }
        let deviation = hermitian_deviation(&h);
        if deviation > ASSEMBLY_TOL {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: ASSEMBLY_TOL,
            });
        }
        let eig = h.symmetric_eigen();
        Ok(Self {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `e^{-iHt}v`.
    pub fn evolve(&self, v: &DVector<Complex64>, t: f64) -> Result<DVector<Complex64>> {
        if v.len() != self.dim() {
            return Err(Error::Usage(format!(
                "vector of length {} for generator of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        if t == 0.0 {
            return Ok(v.clone());
        }
        let mut c = self.eigenvectors.adjoint() * v;
        for (z, e) in c.iter_mut().zip(self.eigenvalues.iter()) {
            *z *= Complex64::from_polar(1.0, -e * t);
        }
        Ok(&self.eigenvectors * c)
    }
}

/// Components concatenated in flat-index order.
pub fn flatten(state: &EnlargedState) -> DVector<Complex64> {
    let data: Vec<Complex64> = state
        .components()
        .iter()
        .flat_map(|c| c.amplitudes().iter().copied())
        .collect();
    DVector::from_vec(data)
}

pub fn unflatten(template: &EnlargedState, v: &DVector<Complex64>) -> Result<EnlargedState> {
    let grid = *template.components()[0].grid();
    let n = grid.n_points();
    if v.len() != n * template.components().len() {
        return Err(Error::Usage("flat vector does not match state layout".into()));
    }
    let comps = v
        .as_slice()
        .chunks(n)
        .map(|c| ComplexField::new(grid, c.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    template.with_components(comps)
}

/// Simulated-space fields (one per spinor entry) as one flat vector.
pub fn flatten_fields(fields: &[ComplexField]) -> DVector<Complex64> {
    DVector::from_vec(fields.iter().flat_map(|f| f.amplitudes().iter().copied()).collect())
}

pub fn unflatten_fields(grid: &Grid1D, v: &DVector<Complex64>) -> Result<Vec<ComplexField>> {
    v.as_slice()
        .chunks(grid.n_points())
        .map(|c| ComplexField::new(*grid, c.to_vec()))
        .collect()
}

pub fn dense_oracle(h: DMatrix<Complex64>, state: &EnlargedState, t: f64) -> Result<EnlargedState> {
    let oracle = DenseOracle::new(h)?;
    unflatten(state, &oracle.evolve(&flatten(state), t)?)
}
