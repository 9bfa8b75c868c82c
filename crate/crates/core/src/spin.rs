//! Dense spin operators and spin state vectors.
//!
//! Random instances come from a pinned stream so that frozen test values are
//! reproducible on every platform: a ChaCha8 generator seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`, each `u64` draw mapped to `[-1, 1)` by
//! `((u >> 11) as f64) * 2^-53 * 2 - 1`. Matrix entries are drawn row-major,
//! real part first.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

pub const MAX_SPIN_DIM: usize = 64;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const ANTICOMMUTE_TOL: f64 = 1e-10;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Hermitian matrix of dimension at most [`MAX_SPIN_DIM`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperator {
    matrix: DMatrix<Complex64>,
    hermitian: bool,
}

pub fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

impl SpinOperator {
    /// Validate squareness, the dimension cap and hermiticity.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Usage(format!(
                "spin operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() > MAX_SPIN_DIM {
            return Err(Error::DimensionCap {
                required: matrix.nrows(),
                allowed: MAX_SPIN_DIM,
            });
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: HERMITIAN_TOL,
            });
        }
        Ok(Self {
            matrix,
            hermitian: true,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
            hermitian: true,
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn kron(&self, other: &SpinOperator) -> Result<SpinOperator> {
        SpinOperator::new(self.matrix.kronecker(&other.matrix))
    }

    pub fn apply(&self, v: &SpinVector) -> Result<SpinVector> {
        if v.dim() != self.dim() {
            return Err(Error::Usage(format!(
                "operator dim {} applied to vector dim {}",
                self.dim(),
                v.dim()
            )));
        }
        Ok(SpinVector(&self.matrix * &v.0))
    }

    /// `e^{-iHt}` from the eigendecomposition.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let eig = self.matrix.clone().symmetric_eigen();
        let phases = eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t));
        let v = &eig.eigenvectors;
        v * DMatrix::from_diagonal(&phases) * v.adjoint()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |m, e| m.max(e.abs()))
    }
}

/// `σ_x, σ_y, σ_z` for `j = 1, 2, 3`.
pub fn pauli(j: u8) -> Result<SpinOperator> {
    let m = match j {
        1 => DMatrix::from_row_slice(2, 2, &[C0, C1, C1, C0]),
        2 => DMatrix::from_row_slice(2, 2, &[C0, -CI, CI, C0]),
        3 => DMatrix::from_row_slice(2, 2, &[C1, C0, C0, -C1]),
        other => return Err(Error::Usage(format!("pauli index must be 1, 2 or 3, got {other}"))),
    };
    Ok(SpinOperator {
        matrix: m,
        hermitian: true,
    })
}

/// `Σ c_j σ_j`.
pub fn hermitian_combination(coeffs: [f64; 3]) -> Result<SpinOperator> {
    if coeffs.iter().all(|&c| c == 0.0) {
        return Err(Error::Usage("hermitian combination of all-zero coefficients".into()));
    }
    let mut m = DMatrix::zeros(2, 2);
    for (j, &c) in coeffs.iter().enumerate() {
        m += pauli(j as u8 + 1)?.matrix * Complex64::new(c, 0.0);
    }
    SpinOperator::new(m)
}

/// The pinned random stream described in the module docs.
#[derive(Debug, Clone)]
pub struct InstanceRng(ChaCha8Rng);

impl InstanceRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `[-1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        let u = self.0.next_u64() >> 11;
        (u as f64) * (1.0 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    pub fn complex(&mut self) -> Complex64 {
        let re = self.symmetric();
        let im = self.symmetric();
        Complex64::new(re, im)
    }
}

/// `(A + A†)/2` with uniform entries, rescaled to unit spectral norm.
pub fn random_hamiltonian(dim: usize, seed: u64) -> Result<SpinOperator> {
    if dim == 0 || dim > MAX_SPIN_DIM {
        return Err(Error::DimensionCap {
            required: dim,
            allowed: MAX_SPIN_DIM,
        });
    }
    let mut rng = InstanceRng::new(seed);
    let mut a = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            a[(i, j)] = rng.complex();
        }
    }
    let h = DMatrix::from_fn(dim, dim, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let op = SpinOperator {
        matrix: h,
        hermitian: true,
    };
    let norm = op.spectral_norm();
    Ok(SpinOperator {
        matrix: op.matrix.map(|z| z / norm),
        hermitian: true,
    })
}

/// Normalized random state with entries from the pinned stream.
pub fn random_state(dim: usize, seed: u64) -> SpinVector {
    let mut rng = InstanceRng::new(seed);
    let v = DVector::from_fn(dim, |_, _| rng.complex());
    let n = v.norm();
    SpinVector(v / Complex64::new(n, 0.0))
}

/// `‖AB + BA‖_max < 1e-10`.
pub fn anticommutes(a: &SpinOperator, b: &SpinOperator) -> Result<bool> {
    Ok(anticommutator_norm(a, b)? < ANTICOMMUTE_TOL)
}

pub fn anticommutator_norm(a: &SpinOperator, b: &SpinOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Usage(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let ac = &a.matrix * &b.matrix + &b.matrix * &a.matrix;
    Ok(ac.iter().fold(0.0, |m, z| m.max(z.norm())))
}

/// A random pair `(H, σ)` with `{H, σ} = 0`, `σ² = I`, `‖H‖ = 1`.
///
/// `H = U[(aσ_x + bσ_y) ⊗ R]U†` and `σ = U(σ_z ⊗ I)U†`, with `R` a random
/// hermitian matrix and `U` the eigenvector matrix of another one.
pub fn random_anticommuting_pair(dim: usize, seed: u64) -> Result<(SpinOperator, SpinOperator)> {
    if dim < 2 || !dim.is_multiple_of(2) || dim > MAX_SPIN_DIM {
        return Err(Error::Usage(format!(
            "anticommuting pairs need an even dimension in 2..={MAX_SPIN_DIM}, got {dim}"
        )));
    }
    let mut rng = InstanceRng::new(seed);
    let (a, b) = (rng.symmetric(), rng.symmetric());
    let qubit = hermitian_combination([a, b, 0.0])?;
    let rest = random_hamiltonian(dim / 2, seed.wrapping_add(1))?;
    let h = qubit.matrix.kronecker(&rest.matrix);
    let s = pauli(3)?.matrix.kronecker(&DMatrix::identity(dim / 2, dim / 2));
    let u = random_hamiltonian(dim, seed.wrapping_add(2))?
        .matrix
        .symmetric_eigen()
        .eigenvectors;
    let conj = |m: &DMatrix<Complex64>| {
        let r = &u * m * u.adjoint();
        // restore exact hermiticity lost to rounding
        DMatrix::from_fn(dim, dim, |i, j| (r[(i, j)] + r[(j, i)].conj()) * 0.5)
    };
    let h = conj(&h);
    let norm = SpinOperator {
        matrix: h.clone(),
        hermitian: true,
    }
    .spectral_norm();
    Ok((
        SpinOperator::new(h.map(|z| z / norm))?,
        SpinOperator::new(conj(&s))?,
    ))
}

/// State vector of a finite-dimensional system.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinVector(pub DVector<Complex64>);

impl SpinVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self(DVector::from_vec(amplitudes))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn inner(&self, other: &SpinVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Usage(format!(
                "vector dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.0.dotc(&other.0))
    }

    pub fn max_abs_diff(&self, other: &SpinVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
