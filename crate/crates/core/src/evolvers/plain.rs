use num_complex::Complex64;

use super::{BaseHamiltonian, PotentialSpec};
use crate::grid::{ComplexField, Grid1D, Spectral};
use crate::spin::{SpinOperator, SpinVector};
use crate::{Error, Result};

/// `ψ ↦ e^{-iHt}ψ` for a time-independent `H`; negative `t` runs backward.
pub trait PlainEvolver<A> {
    fn propagate(&self, psi: &A, t: f64) -> Result<A>;
}

impl<A, E: PlainEvolver<A> + ?Sized> PlainEvolver<A> for Box<E> {
    fn propagate(&self, psi: &A, t: f64) -> Result<A> {
        (**self).propagate(psi, t)
    }
}

impl PlainEvolver<SpinVector> for SpinOperator {
    fn propagate(&self, psi: &SpinVector, t: f64) -> Result<SpinVector> {
        if psi.dim() != self.dim() {
            return Err(Error::Usage(format!(
                "state of dimension {} for operator of dimension {}",
                psi.dim(),
                self.dim()
            )));
        }
        if !self.is_hermitian() {
            return Err(Error::NotHermitian {
                deviation: crate::spin::hermitian_deviation(self.matrix()),
                tolerance: crate::spin::HERMITIAN_TOL,
            });
        }
        Ok(SpinVector(self.propagator(t) * &psi.0))
    }
}

pub fn evolve_plain<A: Clone>(h: &impl PlainEvolver<A>, psi: &A, t: f64) -> Result<A> {
    if t == 0.0 {
        return Ok(psi.clone());
    }
    h.propagate(psi, t)
}

/// Split-step solver for `H = p²/(2m) + V(x)`.
#[derive(Debug, Clone)]
pub struct SchrodingerEvolver {
    spectral: Spectral,
    mass: f64,
    potential: Vec<f64>,
    max_dt: f64,
}

impl SchrodingerEvolver {
    pub fn new(grid: &Grid1D, mass: f64, potential: &PotentialSpec, max_dt: f64) -> Result<Self> {
        if !(mass > 0.0 && max_dt > 0.0) {
            return Err(Error::Config("mass and dt must be positive".into()));
        }
        Ok(Self {
            spectral: Spectral::new(grid),
            mass,
            potential: potential.sample(grid).full,
            max_dt,
        })
    }

    fn step(&self, data: &mut [Complex64], dt: f64) {
        for (z, v) in data.iter_mut().zip(&self.potential) {
            *z *= Complex64::from_polar(1.0, -0.5 * dt * v);
        }
        self.spectral.forward(data);
        for (z, k) in data.iter_mut().zip(self.spectral.wavenumbers()) {
            *z *= Complex64::from_polar(1.0, -dt * k * k / (2.0 * self.mass));
        }
        self.spectral.inverse(data);
        for (z, v) in data.iter_mut().zip(&self.potential) {
            *z *= Complex64::from_polar(1.0, -0.5 * dt * v);
        }
    }
}

impl PlainEvolver<ComplexField> for SchrodingerEvolver {
    fn propagate(&self, psi: &ComplexField, t: f64) -> Result<ComplexField> {
        if psi.grid() != self.spectral.grid() {
            return Err(Error::Usage("field grid differs from evolver grid".into()));
        }
        let steps = (t.abs() / self.max_dt).ceil().max(1.0) as usize;
        let dt = t / steps as f64;
        let mut data = psi.amplitudes().to_vec();
        for _ in 0..steps {
            self.step(&mut data, dt);
        }
        ComplexField::new(*psi.grid(), data)
    }
}

/// `H = p`.
#[derive(Debug, Clone, Copy)]
pub struct FreeTransport;

impl PlainEvolver<ComplexField> for FreeTransport {
    fn propagate(&self, psi: &ComplexField, t: f64) -> Result<ComplexField> {
        Ok(super::evolve_free_plain(psi, t))
    }
}

pub(crate) enum FieldBase {
    Schrodinger(SchrodingerEvolver),
    Free,
}

impl PlainEvolver<ComplexField> for FieldBase {
    fn propagate(&self, psi: &ComplexField, t: f64) -> Result<ComplexField> {
        match self {
            FieldBase::Schrodinger(s) => s.propagate(psi, t),
            FieldBase::Free => FreeTransport.propagate(psi, t),
        }
    }
}

impl BaseHamiltonian {
    /// Evolver for field-valued bases; `None` for spin bases.
    pub fn field_evolver(&self, grid: &Grid1D, max_dt: f64) -> Result<Option<Box<dyn PlainEvolver<ComplexField>>>> {
        Ok(match self {
            BaseHamiltonian::Schrodinger { mass, potential } => Some(Box::new(FieldBase::Schrodinger(
                SchrodingerEvolver::new(grid, *mass, potential, max_dt)?,
            ))),
            BaseHamiltonian::FreeTransport => Some(Box::new(FieldBase::Free)),
            BaseHamiltonian::SpinDense { .. } => None,
        })
    }

    pub fn spin_operator(&self) -> Result<Option<SpinOperator>> {
        match self {
            BaseHamiltonian::SpinDense { matrix } => matrix.build().map(Some),
            _ => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample_packet, PacketParams};
    use crate::spin::{pauli, random_hamiltonian, random_state};
    use nalgebra::DMatrix;

    #[test]
    fn sigma_z_at_pi_is_global_minus_one() {
        let h = pauli(3).unwrap();
        let psi = random_state(2, 5);
        let out = evolve_plain(&h, &psi, std::f64::consts::PI).unwrap();
        let expected = SpinVector(psi.0.map(|z| -z));
        assert!(out.max_abs_diff(&expected) < 1e-14);
        assert_eq!(evolve_plain(&h, &psi, 0.0).unwrap(), psi);
    }

    #[test]
    fn group_property_random_8x8() {
        let h = random_hamiltonian(8, 21).unwrap();
        let prod = h.propagator(0.7) * h.propagator(-0.7);
        let err = (prod - DMatrix::<Complex64>::identity(8, 8)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn schrodinger_is_unitary_and_reversible() {
        let g = make_grid(128, 20.0).unwrap();
        let psi = sample_packet(&g, &PacketParams::new(1.0, 1.0, 0.5).unwrap()).unwrap();
        let ev = SchrodingerEvolver::new(&g, 1.0, &PotentialSpec::polynomial(0.0, vec![0.0, 0.5]), 0.01).unwrap();
        let fwd = ev.propagate(&psi, 1.0).unwrap();
        assert!((fwd.norm_sqr() - 1.0).abs() < 1e-12);
        let back = ev.propagate(&fwd, -1.0).unwrap();
        assert!(back.max_abs_diff(&psi).unwrap() < 1e-12);
    }
}
