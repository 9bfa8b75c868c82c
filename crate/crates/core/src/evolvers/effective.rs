use num_complex::Complex64;

use super::{EvolutionParams, PotentialSpec};
use crate::grid::{ComplexField, Grid1D, Spectral};
use crate::{Error, Result};

/// Split-step solver for `H = [p² + (V^o)² + s·∂_xV^o]/(2m)` with odd `V^o`.
///
/// For an upper-spinor parity eigenstate with eigenvalue `π` of the
/// simulated Dirac equation with `Π_x` in its kinetic term, the
/// nonrelativistic limit has `s = -π`.
#[derive(Debug, Clone)]
pub struct EffectiveNrEvolver {
    spectral: Spectral,
    mass: f64,
    effective: Vec<f64>,
}

impl EffectiveNrEvolver {
    pub fn new(grid: &Grid1D, mass: f64, odd: &PotentialSpec, parity_sign: i8) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Config(format!("mass must be positive, got {mass}")));
        }
        if parity_sign.abs() != 1 {
            return Err(Error::Config(format!("parity_sign must be ±1, got {parity_sign}")));
        }
        odd.validate()?;
        if !odd.is_odd() {
            return Err(Error::NotOdd {
                max_even: odd.max_even_coeff(),
            });
        }
        let sampled = odd.sample(grid);
        let s = parity_sign as f64;
        let effective = sampled
            .odd
            .iter()
            .zip(&sampled.odd_derivative)
            .map(|(v, dv)| (v * v + s * dv) / (2.0 * mass))
            .collect();
        Ok(Self {
            spectral: Spectral::new(grid),
            mass,
            effective,
        })
    }

    /// `(V^o)² + s·∂_xV^o` over `2m`, per node.
    pub fn effective_potential(&self) -> &[f64] {
        &self.effective
    }

    pub fn evolve(&self, psi: &ComplexField, params: &EvolutionParams) -> Result<ComplexField> {
        if psi.grid() != self.spectral.grid() {
            return Err(Error::Usage("field grid differs from evolver grid".into()));
        }
        let dt = params.dt;
        let half: Vec<Complex64> = self
            .effective
            .iter()
            .map(|v| Complex64::from_polar(1.0, -0.5 * dt * v))
            .collect();
        let kin: Vec<Complex64> = self
            .spectral
            .wavenumbers()
            .iter()
            .map(|k| Complex64::from_polar(1.0, -dt * k * k / (2.0 * self.mass)))
            .collect();
        let mut data = psi.amplitudes().to_vec();
        for _ in 0..params.steps {
            data.iter_mut().zip(&half).for_each(|(z, h)| *z *= h);
            self.spectral.forward(&mut data);
            data.iter_mut().zip(&kin).for_each(|(z, h)| *z *= h);
            self.spectral.inverse(&mut data);
            data.iter_mut().zip(&half).for_each(|(z, h)| *z *= h);
        }
        ComplexField::new(*psi.grid(), data)
    }
}

pub fn evolve_effective_nr(
    psi: &ComplexField,
    mass: f64,
    odd: &PotentialSpec,
    parity_sign: i8,
    params: &EvolutionParams,
) -> Result<ComplexField> {
    EffectiveNrEvolver::new(psi.grid(), mass, odd, parity_sign)?.evolve(psi, params)
}
