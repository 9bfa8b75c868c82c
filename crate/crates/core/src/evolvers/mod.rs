//! Time evolution of simulated and enlarged states.
//!
//! Kinetic and mass blocks are exponentiated exactly per Fourier mode using
//! closed-form Pauli exponentials. Position-dependent terms enter through
//! Strang splitting. [`dense`] assembles the same generators as explicit
//! matrices on small grids for brute-force comparison.

pub mod dense;
mod dirac;
mod effective;
mod free;
mod plain;
mod potential;
mod time_parity;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use dirac::DiracParityEvolver;
pub use effective::{evolve_effective_nr, EffectiveNrEvolver};
pub use free::{evolve_free_enlarged, evolve_free_plain};
pub use plain::{evolve_plain, PlainEvolver, SchrodingerEvolver};
pub use potential::{PotentialSpec, SampledPotential};
pub use time_parity::evolve_time_parity;

use crate::spin::{hermitian_combination, pauli, random_hamiltonian, SpinOperator};
use crate::transforms::TildeCoeffs;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    ExactSpectral,
    StrangSplit,
    DenseExpm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    pub dt: f64,
    pub steps: usize,
    pub method: Method,
}

impl EvolutionParams {
    pub fn new(dt: f64, steps: usize, method: Method) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) || steps == 0 {
            return Err(Error::Config(format!(
                "need dt > 0 and steps > 0, got dt={dt}, steps={steps}"
            )));
        }
        Ok(Self { dt, steps, method })
    }

    /// Uniform steps no larger than `max_dt` covering exactly `t_total`.
    pub fn covering(t_total: f64, max_dt: f64, method: Method) -> Result<Self> {
        if !(t_total.is_finite() && t_total > 0.0 && max_dt > 0.0) {
            return Err(Error::Config(format!(
                "need t_total > 0 and dt > 0, got t_total={t_total}, dt={max_dt}"
            )));
        }
        let steps = (t_total / max_dt - 1e-9).ceil().max(1.0) as usize;
        Self::new(t_total / steps as f64, steps, method)
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

/// Dense matrix given inline or by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum MatrixSpec {
    /// Row-major entries as `[re, im]` pairs.
    Rows(Vec<Vec<[f64; 2]>>),
    Pauli { pauli: u8 },
    Combination { combination: [f64; 3] },
    Random { random_dim: usize, seed: u64 },
}

impl MatrixSpec {
    pub fn build(&self) -> Result<SpinOperator> {
        match self {
            MatrixSpec::Rows(rows) => {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Config("matrix rows must form a square".into()));
                }
                let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
                SpinOperator::new(m)
            }
            MatrixSpec::Pauli { pauli: j } => pauli(*j),
            MatrixSpec::Combination { combination } => hermitian_combination(*combination),
            MatrixSpec::Random { random_dim, seed } => random_hamiltonian(*random_dim, *seed),
        }
    }
}

/// Time-independent dynamics usable as the base of a time-parity enlargement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BaseHamiltonian {
    /// `H = p²/(2m) + V` on the grid.
    Schrodinger { mass: f64, potential: PotentialSpec },
    /// `H = p`.
    FreeTransport,
    SpinDense { matrix: MatrixSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    /// `i∂_tΨ = -i[t1·I + t2·σ_x]∂_xΨ`; coefficients default to those of the transform.
    FreeTransportEnlarged {
        #[serde(default)]
        tilde: Option<TildeCoeffs>,
    },
    /// `p σ_y⊗σ_x + m I⊗σ_z + V^e I⊗σ_x + V^o σ_x⊗σ_x`.
    DiracParityEnlarged { mass: f64, potential: PotentialSpec },
    /// `σ_x ⊗ H`.
    TimeParityEnlarged { base: BaseHamiltonian },
    /// `[p² + (V^o)² + s·∂_xV^o]/(2m)`.
    EffectiveNr {
        mass: f64,
        potential: PotentialSpec,
        parity_sign: i8,
    },
    SpinDense { matrix: MatrixSpec },
}

impl HamiltonianSpec {
    pub fn validate(&self) -> Result<()> {
        let positive_mass = |m: f64| {
            if m.is_finite() && m > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("mass must be positive, got {m}")))
            }
        };
        match self {
            HamiltonianSpec::FreeTransportEnlarged { .. } => Ok(()),
            HamiltonianSpec::DiracParityEnlarged { mass, potential } => {
                positive_mass(*mass)?;
                potential.validate()
            }
            HamiltonianSpec::TimeParityEnlarged { base } => match base {
                BaseHamiltonian::Schrodinger { mass, potential } => {
                    positive_mass(*mass)?;
                    potential.validate()
                }
                BaseHamiltonian::FreeTransport => Ok(()),
                BaseHamiltonian::SpinDense { matrix } => matrix.build().map(|_| ()),
            },
            HamiltonianSpec::EffectiveNr {
                mass,
                potential,
                parity_sign,
            } => {
                positive_mass(*mass)?;
                potential.validate()?;
                if !potential.is_odd() {
                    return Err(Error::NotOdd {
                        max_even: potential.max_even_coeff(),
                    });
                }
                if parity_sign.abs() != 1 {
                    return Err(Error::Config(format!(
                        "parity_sign must be +1 or -1, got {parity_sign}"
                    )));
                }
                Ok(())
            }
            HamiltonianSpec::SpinDense { matrix } => matrix.build().map(|_| ()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            HamiltonianSpec::FreeTransportEnlarged { .. } => "free-transport-enlarged",
            HamiltonianSpec::DiracParityEnlarged { .. } => "dirac-parity-enlarged",
            HamiltonianSpec::TimeParityEnlarged { .. } => "time-parity-enlarged",
            HamiltonianSpec::EffectiveNr { .. } => "effective-nr",
            HamiltonianSpec::SpinDense { .. } => "spin-dense",
        }
    }
}
